// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rovf/core/autodiff.hpp"
#include "rovf/encoders/frame_tokens.hpp"

namespace rovf::encoders {

enum class EncoderKind { kToyPatch, kPrecomputed };

std::string to_string(EncoderKind kind);
EncoderKind encoder_kind_from_string(const std::string& text);

struct EncoderConfig {
  EncoderKind kind = EncoderKind::kToyPatch;
  int patch_size = 16;  // toy_patch only
  int d_model = 768;
  bool trainable = true;
  int resize_to = 224;  // frame side the toy encoder expects
  int channels = 3;

  int patches_per_side() const noexcept { return resize_to / patch_size; }
  int n_tokens() const noexcept { return patches_per_side() * patches_per_side(); }
  int patch_dim() const noexcept { return channels * patch_size * patch_size; }
  void validate() const;

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

/// Fixed sinusoidal offsets: even columns sin(i / 10000^(2k/d)), odd columns
/// the matching cos, for token index i.
Matrix sinusoidal_positions(int n_tokens, int d_model);

/// Small trainable patch embedder standing in for a pretrained backbone.
///
/// A frame (planar, values in [0, 1]) is split into non-overlapping
/// patch_size x patch_size patches in row-major patch order, each flattened
/// as (channel, row, column), centred to [-1, 1], projected linearly to
/// d_model and offset by the sinusoidal position of its patch.
class ToyPatchEncoder {
 public:
  ToyPatchEncoder() = default;
  /// Projection weights ~ N(0, 1/patch_dim), bias 0.
  ToyPatchEncoder(const EncoderConfig& cfg, std::uint64_t seed);
  /// Rebuilds an encoder around loaded parameters; validates names and shapes.
  static ToyPatchEncoder from_parameters(const EncoderConfig& cfg, ParameterSet params);

  const EncoderConfig& config() const noexcept { return cfg_; }
  ParameterSet& params() noexcept { return params_; }
  const ParameterSet& params() const noexcept { return params_; }
  const Matrix& positions() const noexcept { return positions_; }

  Matrix patchify(std::span<const float> frame) const;
  FrameTokens encode(std::span<const float> frame) const;
  /// Graph version; `grads` null keeps the encoder frozen.
  Var encode(Graph& graph, std::span<const float> frame, Gradients* grads) const;

  static constexpr std::size_t kWeight = 0;
  static constexpr std::size_t kBias = 1;

 private:
  EncoderConfig cfg_;
  ParameterSet params_;
  Matrix positions_;
};

/// Mean over the tokens of each frame, then mean over frames. Each sum adds
/// its terms in sorted order, so the result does not depend on token or
/// frame order.
std::vector<double> average_baseline(std::span<const FrameTokens> frames);

}  // namespace rovf::encoders
