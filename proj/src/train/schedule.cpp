// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/train/schedule.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rovf/core/error.hpp"

namespace rovf::train {

void ScheduleConfig::validate() const {
  if (!(lr_start >= 0.0 && lr_end >= 0.0 && lr_start <= lr_peak && lr_end <= lr_peak)) {
    throw ValidationError("schedule: need 0 <= lr_start <= lr_peak and 0 <= lr_end <= lr_peak");
  }
  if (!(warmup_fraction > 0.0 && warmup_fraction < 1.0)) {
    throw ValidationError("schedule: warmup_fraction must be in (0, 1)");
  }
}

long warmup_steps(long steps_per_epoch, const ScheduleConfig& cfg) {
  if (steps_per_epoch < 1) throw ValidationError("schedule: steps_per_epoch must be >= 1");
  const long w = std::lround(cfg.warmup_fraction * static_cast<double>(steps_per_epoch));
  return w < 1 ? 1 : w;
}

double lr_at(long step, long steps_per_epoch, long total_steps, const ScheduleConfig& cfg) {
  cfg.validate();
  const long w = warmup_steps(steps_per_epoch, cfg);
  if (total_steps <= w) {
    throw ValidationError("schedule: total_steps " + std::to_string(total_steps) +
                          " must exceed warmup_steps " + std::to_string(w));
  }
  if (step < 0 || step >= total_steps) {
    throw ValidationError("schedule: step " + std::to_string(step) + " outside [0, " +
                          std::to_string(total_steps) + ")");
  }
  if (step <= w) {
    const double f = static_cast<double>(step) / static_cast<double>(w);
    return cfg.lr_start * (1.0 - f) + cfg.lr_peak * f;
  }
  const long span = total_steps - 1 - w;
  const double t = static_cast<double>(step - w) / static_cast<double>(span);
  const double c = (1.0 + std::cos(std::numbers::pi * t)) / 2.0;
  // c is exactly 0 at t = 1 since cos(pi) rounds to -1.
  return cfg.lr_peak * c + cfg.lr_end * (1.0 - c);
}

}  // namespace rovf::train
