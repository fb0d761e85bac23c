// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/train/optimizer.hpp"

#include <cmath>

#include "rovf/core/error.hpp"

namespace rovf::train {

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::kSgd ? "sgd" : "adam"; }

OptimizerKind optimizer_kind_from_string(const std::string& s) {
  if (s == "sgd") return OptimizerKind::kSgd;
  if (s == "adam") return OptimizerKind::kAdam;
  throw ValidationError("unknown optimizer '" + s + "' (expected sgd or adam)");
}

namespace {

void check_match(const ParameterSet& params, const Gradients& grads) {
  if (params.size() != grads.size()) throw ValidationError("optimizer: gradient count mismatch");
}

}  // namespace

void Sgd::step(ParameterSet& params, const Gradients& grads, double lr) {
  check_match(params, grads);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].value.values();
    auto g = grads[i].values();
    for (std::size_t j = 0; j < p.size(); ++j) p[j] -= lr * g[j];
  }
}

void Adam::step(ParameterSet& params, const Gradients& grads, double lr) {
  check_match(params, grads);
  if (m_.empty()) {
    for (const Parameter& p : params) {
      m_.emplace_back(p.value.rows(), p.value.cols());
      v_.emplace_back(p.value.rows(), p.value.cols());
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].value.values();
    auto g = grads[i].values();
    auto m = m_[i].values();
    auto v = v_[i].values();
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
      v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
      p[j] -= lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + cfg_.eps);
    }
  }
}

std::unique_ptr<Optimizer> make_optimizer(const OptimizerConfig& cfg) {
  if (cfg.kind == OptimizerKind::kAdam) return std::make_unique<Adam>(cfg);
  return std::make_unique<Sgd>();
}

}  // namespace rovf::train
