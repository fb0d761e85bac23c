// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rovf/core/matrix.hpp"

namespace rovf::encoders {

/// Per-frame token embeddings, one row per token (patch).
struct FrameTokens {
  Matrix tokens;  // n_tokens x d_model

  std::size_t n_tokens() const noexcept { return tokens.rows(); }
  std::size_t d_model() const noexcept { return tokens.cols(); }

  friend bool operator==(const FrameTokens&, const FrameTokens&) = default;
};

}  // namespace rovf::encoders
