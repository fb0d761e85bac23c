// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/model/rovf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rovf/core/error.hpp"
#include "rovf/core/kernels.hpp"

namespace rovf::model {

void RoVFConfig::validate() const {
  if (d_model < 1 || n_latents < 1 || n_layers < 1 || n_heads < 1 || out_dim < 1 ||
      d_ff < 0) {
    throw ValidationError("rovf config: all counts must be >= 1");
  }
  if (d_model % n_heads != 0) {
    throw ValidationError("rovf config: d_model " + std::to_string(d_model) +
                          " is not divisible by n_heads " + std::to_string(n_heads));
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ValidationError("rovf config: dropout must be in [0, 1)");
  }
}

namespace {

Matrix normal_matrix(std::size_t r, std::size_t c, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 0.02);
  Matrix m(r, c);
  for (double& v : m.values()) v = normal(rng);
  return m;
}

}  // namespace

RoVFModel::RoVFModel(const RoVFConfig& cfg, std::uint64_t seed) : cfg_(cfg), init_seed_(seed) {
  cfg_.validate();
  Rng rng = make_rng(seed, "rovf.init");
  const auto d = static_cast<std::size_t>(cfg_.d_model);
  const auto ff = static_cast<std::size_t>(cfg_.ff_width());
  auto weight = [&](const std::string& name, std::size_t r, std::size_t c) {
    params_.add(name, normal_matrix(r, c, rng));
  };
  auto zeros = [&](const std::string& name, std::size_t c) { params_.add(name, Matrix(1, c)); };
  auto ones = [&](const std::string& name, std::size_t c) {
    params_.add(name, Matrix(1, c, 1.0));
  };
  auto attention = [&](const std::string& prefix) {
    for (const char* p : {"q", "k", "v", "o"}) {
      weight(prefix + ".w" + p, d, d);
      zeros(prefix + ".b" + p, d);
    }
  };

  weight("rovf.latent", static_cast<std::size_t>(cfg_.n_latents), d);
  ones("rovf.cross.ln_q.gain", d);
  zeros("rovf.cross.ln_q.bias", d);
  ones("rovf.cross.ln_kv.gain", d);
  zeros("rovf.cross.ln_kv.bias", d);
  attention("rovf.cross.attn");
  for (int l = 0; l < cfg_.n_layers; ++l) {
    const std::string p = "rovf.layer" + std::to_string(l);
    ones(p + ".ln1.gain", d);
    zeros(p + ".ln1.bias", d);
    attention(p + ".attn");
    ones(p + ".ln2.gain", d);
    zeros(p + ".ln2.bias", d);
    weight(p + ".ff.w1", d, ff);
    zeros(p + ".ff.b1", ff);
    weight(p + ".ff.w2", ff, d);
    zeros(p + ".ff.b2", d);
  }
  weight("rovf.out.weight", d, static_cast<std::size_t>(cfg_.out_dim));
  zeros("rovf.out.bias", static_cast<std::size_t>(cfg_.out_dim));
  bind_indices();
}

RoVFModel RoVFModel::from_parameters(const RoVFConfig& cfg, std::uint64_t init_seed,
                                     ParameterSet params) {
  RoVFModel reference(cfg, init_seed);
  if (params.size() != reference.params_.size()) {
    throw ValidationError("rovf parameters: expected " +
                          std::to_string(reference.params_.size()) + " blocks, got " +
                          std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter& want = reference.params_[i];
    const Parameter& got = params[i];
    if (got.name != want.name || !got.value.same_shape(want.value)) {
      throw ValidationError("rovf parameters: block " + std::to_string(i) + " is " + got.name +
                            " " + shape_string(got.value) + ", expected " + want.name + " " +
                            shape_string(want.value));
    }
  }
  reference.params_ = std::move(params);
  reference.bind_indices();
  return reference;
}

void RoVFModel::bind_indices() {
  auto at = [&](const std::string& name) { return params_.index(name); };
  auto attention = [&](const std::string& prefix) {
    return Attention{at(prefix + ".wq"), at(prefix + ".bq"), at(prefix + ".wk"),
                     at(prefix + ".bk"), at(prefix + ".wv"), at(prefix + ".bv"),
                     at(prefix + ".wo"), at(prefix + ".bo")};
  };
  latent_ = at("rovf.latent");
  lnq_g_ = at("rovf.cross.ln_q.gain");
  lnq_b_ = at("rovf.cross.ln_q.bias");
  lnkv_g_ = at("rovf.cross.ln_kv.gain");
  lnkv_b_ = at("rovf.cross.ln_kv.bias");
  cross_ = attention("rovf.cross.attn");
  layers_.clear();
  for (int l = 0; l < cfg_.n_layers; ++l) {
    const std::string p = "rovf.layer" + std::to_string(l);
    layers_.push_back(Layer{at(p + ".ln1.gain"), at(p + ".ln1.bias"), attention(p + ".attn"),
                            at(p + ".ln2.gain"), at(p + ".ln2.bias"), at(p + ".ff.w1"),
                            at(p + ".ff.b1"), at(p + ".ff.w2"), at(p + ".ff.b2")});
  }
  out_w_ = at("rovf.out.weight");
  out_b_ = at("rovf.out.bias");
}

HiddenState RoVFModel::initial_state() const { return HiddenState{params_[latent_].value}; }

Var RoVFModel::attend(Graph& g, const Attention& a, Var queries, Var keys_values, Mode mode,
                      Rng* rng, Gradients* grads) const {
  auto p = [&](std::size_t i) { return g.parameter(params_, i, grads); };
  Rng* drop = mode == Mode::kTrain ? rng : nullptr;
  Var q = g.linear(queries, p(a.wq), p(a.bq));
  Var k = g.linear(keys_values, p(a.wk), p(a.bk));
  Var v = g.linear(keys_values, p(a.wv), p(a.bv));
  Var mixed = g.attention(q, k, v, cfg_.n_heads, cfg_.dropout, drop);
  return g.linear(mixed, p(a.wo), p(a.bo));
}

RoVFModel::GraphStep RoVFModel::step(Graph& g, Var latent, Var frame_tokens, Mode mode, Rng* rng,
                                     Gradients* grads) const {
  const Matrix& tokens = g.value(frame_tokens);
  if (tokens.cols() != static_cast<std::size_t>(cfg_.d_model)) {
    throw ValidationError("rovf_step: frame tokens have width " + std::to_string(tokens.cols()) +
                          ", model expects " + std::to_string(cfg_.d_model));
  }
  if (tokens.rows() == 0) throw ValidationError("rovf_step: frame has no tokens");
  const Matrix& lat = g.value(latent);
  if (lat.rows() != static_cast<std::size_t>(cfg_.n_latents) ||
      lat.cols() != static_cast<std::size_t>(cfg_.d_model)) {
    throw ValidationError("rovf_step: hidden state has shape " + shape_string(lat));
  }
  auto p = [&](std::size_t i) { return g.parameter(params_, i, grads); };
  Rng* drop = mode == Mode::kTrain ? rng : nullptr;
  const double pd = cfg_.dropout;

  Var x = g.dropout(frame_tokens, pd, drop);
  Var q_in = g.layer_norm(latent, p(lnq_g_), p(lnq_b_));
  Var kv_in = g.layer_norm(x, p(lnkv_g_), p(lnkv_b_));
  Var h = g.add(latent, g.dropout(attend(g, cross_, q_in, kv_in, mode, rng, grads), pd, drop));

  for (const Layer& layer : layers_) {
    Var n1 = g.layer_norm(h, p(layer.ln1_g), p(layer.ln1_b));
    h = g.add(h, g.dropout(attend(g, layer.attn, n1, n1, mode, rng, grads), pd, drop));
    Var n2 = g.layer_norm(h, p(layer.ln2_g), p(layer.ln2_b));
    Var inner = g.dropout(g.gelu(g.linear(n2, p(layer.w1), p(layer.b1))), pd, drop);
    h = g.add(h, g.dropout(g.linear(inner, p(layer.w2), p(layer.b2)), pd, drop));
  }
  Var embedding = g.linear(g.mean_rows(h), p(out_w_), p(out_b_));
  return {h, embedding};
}

Var RoVFModel::forward(Graph& g, std::span<const Var> frames, Mode mode, Rng* rng,
                       Gradients* grads) const {
  if (frames.empty()) throw ValidationError("rovf_forward: empty clip");
  Var latent = g.parameter(params_, latent_, grads);
  Var embedding;
  for (Var frame : frames) {
    GraphStep s = step(g, latent, frame, mode, rng, grads);
    latent = s.latent;
    embedding = s.embedding;
  }
  return embedding;
}

RoVFModel init_model(const RoVFConfig& cfg, std::uint64_t seed) { return RoVFModel(cfg, seed); }

StepOutput rovf_step(const RoVFModel& model, const HiddenState& h,
                     const encoders::FrameTokens& frame, Mode mode, Rng* rng) {
  Graph g(false);
  RoVFModel::GraphStep s =
      model.step(g, g.constant(h.latent), g.constant(frame.tokens), mode, rng, nullptr);
  const Matrix& e = g.value(s.embedding);
  return {HiddenState{g.value(s.latent)}, std::vector<double>(e.values().begin(), e.values().end())};
}

std::vector<double> rovf_forward(const RoVFModel& model,
                                 std::span<const encoders::FrameTokens> clip, Mode mode,
                                 Rng* rng) {
  Graph g(false);
  std::vector<Var> frames;
  frames.reserve(clip.size());
  for (const auto& f : clip) frames.push_back(g.constant(f.tokens));
  Var e = model.forward(g, frames, mode, rng, nullptr);
  auto values = g.value(e).values();
  return {values.begin(), values.end()};
}

double triplet_loss(std::span<const double> a, std::span<const double> p,
                    std::span<const double> n, double margin) {
  if (a.size() != p.size() || a.size() != n.size()) {
    throw ValidationError("triplet_loss: dimension mismatch");
  }
  for (auto s : {a, p, n}) {
    for (double v : s) {
      if (!std::isfinite(v)) throw ValidationError("triplet_loss: non-finite input");
    }
  }
  return std::max(kernels::euclidean(a, p) - kernels::euclidean(a, n) + margin, 0.0);
}

}  // namespace rovf::model
