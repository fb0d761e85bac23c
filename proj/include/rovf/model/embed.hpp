// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "rovf/encoders/clip_encoder.hpp"
#include "rovf/model/rovf.hpp"

namespace rovf::model {

/// Eval-mode embedding of one clip (encoder then head, no dropout).
std::vector<double> embed_clip(const RoVFModel& model, const encoders::ClipEncoder& encoder,
                               long clip_id);

/// Row i is embed_clip(clip_ids[i]). Clips are spread over OpenMP threads;
/// every row is computed independently so the result does not depend on the
/// thread count.
Matrix embed_clips(const RoVFModel& model, const encoders::ClipEncoder& encoder,
                   std::span<const long> clip_ids);

}  // namespace rovf::model
