// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rovf/core/autodiff.hpp"
#include "rovf/encoders/frame_tokens.hpp"

namespace rovf::model {

struct RoVFConfig {
  int d_model = 768;
  int n_latents = 32;
  int n_layers = 2;
  int n_heads = 8;
  double dropout = 0.1;
  int d_ff = 0;  // 0 means 4 * d_model
  int out_dim = 768;

  int ff_width() const noexcept { return d_ff > 0 ? d_ff : 4 * d_model; }
  void validate() const;

  friend bool operator==(const RoVFConfig&, const RoVFConfig&) = default;
};

enum class Mode { kTrain, kEval };

/// The latent array carried from frame to frame.
struct HiddenState {
  Matrix latent;  // n_latents x d_model
};

/// Recurrent head over per-frame token embeddings.
///
/// One step with latent L and frame tokens X:
///   X' = dropout(X)
///   L  = L + dropout(CrossAttn(LN_q(L), LN_kv(X')))
///   for each layer:
///     L = L + dropout(SelfAttn(LN_1(L)))
///     L = L + dropout(W_2 dropout(gelu(W_1 LN_2(L) + b_1)) + b_2)
///   embedding = mean_rows(L) W_out + b_out
/// Attention weights are dropped out as well. Dropout only acts in train mode.
class RoVFModel {
 public:
  RoVFModel() = default;
  /// Weights ~ N(0, 0.02^2) (including the initial latent array), layer-norm
  /// gains 1, all biases 0. Deterministic in `seed`.
  RoVFModel(const RoVFConfig& cfg, std::uint64_t seed);

  const RoVFConfig& config() const noexcept { return cfg_; }
  std::uint64_t init_seed() const noexcept { return init_seed_; }
  ParameterSet& params() noexcept { return params_; }
  const ParameterSet& params() const noexcept { return params_; }

  HiddenState initial_state() const;

  struct GraphStep {
    Var latent;
    Var embedding;
  };

  /// One recurrence step on a graph. `grads` null freezes the head.
  GraphStep step(Graph& graph, Var latent, Var frame_tokens, Mode mode, Rng* rng,
                 Gradients* grads) const;
  /// Folds step() over the frames starting from the learned initial latent and
  /// returns the last embedding (1 x out_dim).
  Var forward(Graph& graph, std::span<const Var> frames, Mode mode, Rng* rng,
              Gradients* grads) const;

  /// Rebuilds a model around existing parameter values (checkpoint loading).
  static RoVFModel from_parameters(const RoVFConfig& cfg, std::uint64_t init_seed,
                                   ParameterSet params);

 private:
  struct Attention {
    std::size_t wq, bq, wk, bk, wv, bv, wo, bo;
  };
  struct Layer {
    std::size_t ln1_g, ln1_b;
    Attention attn;
    std::size_t ln2_g, ln2_b, w1, b1, w2, b2;
  };

  void bind_indices();
  Var attend(Graph& g, const Attention& a, Var queries, Var keys_values, Mode mode, Rng* rng,
             Gradients* grads) const;

  RoVFConfig cfg_;
  std::uint64_t init_seed_ = 0;
  ParameterSet params_;
  std::size_t latent_ = 0;
  std::size_t lnq_g_ = 0, lnq_b_ = 0, lnkv_g_ = 0, lnkv_b_ = 0;
  Attention cross_{};
  std::vector<Layer> layers_;
  std::size_t out_w_ = 0, out_b_ = 0;
};

RoVFModel init_model(const RoVFConfig& cfg, std::uint64_t seed);

struct StepOutput {
  HiddenState state;
  std::vector<double> embedding;
};

StepOutput rovf_step(const RoVFModel& model, const HiddenState& h,
                     const encoders::FrameTokens& frame, Mode mode, Rng* rng);

std::vector<double> rovf_forward(const RoVFModel& model,
                                 std::span<const encoders::FrameTokens> clip, Mode mode,
                                 Rng* rng);

/// max(||a - p||_2 - ||a - n||_2 + margin, 0).
double triplet_loss(std::span<const double> a, std::span<const double> p,
                    std::span<const double> n, double margin);

}  // namespace rovf::model
