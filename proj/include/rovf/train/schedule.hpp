// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace rovf::train {

struct ScheduleConfig {
  double lr_start = 1e-4;
  double lr_peak = 5e-4;
  double lr_end = 1e-5;
  double warmup_fraction = 0.05;  // of one epoch

  void validate() const;
};

/// round(warmup_fraction * steps_per_epoch), at least 1.
long warmup_steps(long steps_per_epoch, const ScheduleConfig& cfg);

/// Linear warmup from lr_start (step 0) to lr_peak (step W), then cosine
/// decay to lr_end at the final step total_steps - 1:
///   lr = lr_end + (lr_peak - lr_end) * (1 + cos(pi t)) / 2,
///   t = (step - W) / (total_steps - 1 - W).
/// Both phases are evaluated as convex combinations so the end points come
/// out exactly. Throws ValidationError if total_steps <= W or step is out of
/// range.
double lr_at(long step, long steps_per_epoch, long total_steps, const ScheduleConfig& cfg);

}  // namespace rovf::train
