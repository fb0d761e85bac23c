// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/model/embed.hpp"

#include <exception>
#include <mutex>

namespace rovf::model {

std::vector<double> embed_clip(const RoVFModel& model, const encoders::ClipEncoder& encoder,
                               long clip_id) {
  const std::vector<encoders::FrameTokens> frames = encoder.encode(clip_id);
  return rovf_forward(model, frames, Mode::kEval, nullptr);
}

Matrix embed_clips(const RoVFModel& model, const encoders::ClipEncoder& encoder,
                   std::span<const long> clip_ids) {
  const auto n = static_cast<std::ptrdiff_t>(clip_ids.size());
  Matrix out(clip_ids.size(), static_cast<std::size_t>(model.config().out_dim));
  std::exception_ptr failure;
  std::ptrdiff_t failed_at = n;
  std::mutex guard;
#pragma omp parallel for schedule(dynamic, 1) if (n > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const std::vector<double> e = embed_clip(model, encoder, clip_ids[static_cast<std::size_t>(i)]);
      std::copy(e.begin(), e.end(), out.row(static_cast<std::size_t>(i)).begin());
    } catch (...) {
      // Report the lowest failing index so the error is thread-count independent.
      std::lock_guard lock(guard);
      if (i < failed_at) {
        failed_at = i;
        failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace rovf::model
