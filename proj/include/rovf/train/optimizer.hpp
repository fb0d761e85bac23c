// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "rovf/core/autodiff.hpp"

namespace rovf::train {

enum class OptimizerKind { kSgd, kAdam };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_kind_from_string(const std::string& s);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kSgd;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Updates one ParameterSet in place from matching gradients.
class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual void step(ParameterSet& params, const Gradients& grads, double lr) = 0;
};

/// p <- p - lr * g
class Sgd : public Optimizer {
 public:
  void step(ParameterSet& params, const Gradients& grads, double lr) override;
};

/// Adam with bias correction:
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
///   p <- p - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
class Adam : public Optimizer {
 public:
  explicit Adam(const OptimizerConfig& cfg) : cfg_(cfg) {}
  void step(ParameterSet& params, const Gradients& grads, double lr) override;

 private:
  OptimizerConfig cfg_;
  long t_ = 0;
  std::vector<Matrix> m_, v_;
};

std::unique_ptr<Optimizer> make_optimizer(const OptimizerConfig& cfg);

}  // namespace rovf::train
