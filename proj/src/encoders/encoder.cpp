// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/encoders/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rovf/core/error.hpp"

namespace rovf::encoders {

std::string to_string(EncoderKind kind) {
  return kind == EncoderKind::kToyPatch ? "toy_patch" : "precomputed";
}

EncoderKind encoder_kind_from_string(const std::string& text) {
  if (text == "toy_patch") return EncoderKind::kToyPatch;
  if (text == "precomputed") return EncoderKind::kPrecomputed;
  throw ValidationError("unknown encoder kind '" + text + "'");
}

void EncoderConfig::validate() const {
  if (d_model < 1) throw ValidationError("encoder: d_model must be >= 1");
  if (kind == EncoderKind::kToyPatch) {
    if (patch_size < 1 || resize_to < 1 || channels < 1) {
      throw ValidationError("encoder: patch_size, resize_to, channels must be >= 1");
    }
    if (resize_to % patch_size != 0) {
      throw ValidationError("encoder: resize_to " + std::to_string(resize_to) +
                            " is not divisible by patch_size " + std::to_string(patch_size));
    }
  }
}

Matrix sinusoidal_positions(int n_tokens, int d_model) {
  Matrix pos(static_cast<std::size_t>(n_tokens), static_cast<std::size_t>(d_model));
  for (int i = 0; i < n_tokens; ++i) {
    for (int c = 0; c < d_model; ++c) {
      const int k = c / 2;
      const double freq = std::pow(10000.0, -2.0 * k / d_model);
      pos(static_cast<std::size_t>(i), static_cast<std::size_t>(c)) =
          (c % 2 == 0) ? std::sin(i * freq) : std::cos(i * freq);
    }
  }
  return pos;
}

ToyPatchEncoder::ToyPatchEncoder(const EncoderConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.kind != EncoderKind::kToyPatch) {
    throw ValidationError("ToyPatchEncoder requires kind toy_patch");
  }
  Rng rng = make_rng(seed, "encoder.init");
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(double(cfg_.patch_dim())));
  Matrix w(static_cast<std::size_t>(cfg_.patch_dim()), static_cast<std::size_t>(cfg_.d_model));
  for (double& v : w.values()) v = normal(rng);
  params_.add("encoder.patch_proj.weight", std::move(w));
  params_.add("encoder.patch_proj.bias", Matrix(1, static_cast<std::size_t>(cfg_.d_model)));
  positions_ = sinusoidal_positions(cfg_.n_tokens(), cfg_.d_model);
}

ToyPatchEncoder ToyPatchEncoder::from_parameters(const EncoderConfig& cfg, ParameterSet params) {
  ToyPatchEncoder enc(cfg, 0);
  if (params.size() != enc.params_.size()) {
    throw ValidationError("encoder parameters: expected " + std::to_string(enc.params_.size()) +
                          " blocks, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].name != enc.params_[i].name ||
        !params[i].value.same_shape(enc.params_[i].value)) {
      throw ValidationError("encoder parameters: unexpected block " + params[i].name + " " +
                            shape_string(params[i].value));
    }
  }
  enc.params_ = std::move(params);
  return enc;
}

Matrix ToyPatchEncoder::patchify(std::span<const float> frame) const {
  const int side = cfg_.resize_to, p = cfg_.patch_size, per = cfg_.patches_per_side();
  const std::size_t expected = static_cast<std::size_t>(cfg_.channels) * side * side;
  if (frame.size() != expected) {
    throw ValidationError("toy encoder: frame has " + std::to_string(frame.size()) +
                          " values, expected " + std::to_string(expected));
  }
  Matrix patches(static_cast<std::size_t>(cfg_.n_tokens()),
                 static_cast<std::size_t>(cfg_.patch_dim()));
  for (int pr = 0; pr < per; ++pr) {
    for (int pc = 0; pc < per; ++pc) {
      auto row = patches.row(static_cast<std::size_t>(pr * per + pc));
      std::size_t k = 0;
      for (int ch = 0; ch < cfg_.channels; ++ch) {
        for (int y = 0; y < p; ++y) {
          for (int x = 0; x < p; ++x) {
            const float v = frame[(static_cast<std::size_t>(ch) * side + pr * p + y) * side +
                                  pc * p + x];
            row[k++] = 2.0 * static_cast<double>(v) - 1.0;
          }
        }
      }
    }
  }
  return patches;
}

Var ToyPatchEncoder::encode(Graph& graph, std::span<const float> frame, Gradients* grads) const {
  Var patches = graph.constant(patchify(frame));
  Var w = graph.parameter(params_, kWeight, grads);
  Var b = graph.parameter(params_, kBias, grads);
  Var projected = graph.linear(patches, w, b);
  return graph.add(projected, graph.constant(positions_));
}

FrameTokens ToyPatchEncoder::encode(std::span<const float> frame) const {
  Graph graph(false);
  Var tokens = encode(graph, frame, nullptr);
  return FrameTokens{graph.value(tokens)};
}

namespace {

// Sum in ascending value order so the result does not depend on input order.
double canonical_sum(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

}  // namespace

std::vector<double> average_baseline(std::span<const FrameTokens> frames) {
  if (frames.empty()) throw ValidationError("average_baseline: empty frame sequence");
  const std::size_t d = frames.front().d_model();
  for (const FrameTokens& f : frames) {
    if (f.d_model() != d) throw ValidationError("average_baseline: frames disagree on d_model");
    if (f.n_tokens() == 0) throw ValidationError("average_baseline: frame without tokens");
  }
  std::vector<double> video(d, 0.0);
  std::vector<double> column, frame_means(frames.size());
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t fi = 0; fi < frames.size(); ++fi) {
      const FrameTokens& f = frames[fi];
      column.resize(f.n_tokens());
      for (std::size_t t = 0; t < f.n_tokens(); ++t) column[t] = f.tokens(t, c);
      frame_means[fi] = canonical_sum(column) / static_cast<double>(f.n_tokens());
    }
    std::vector<double> means = frame_means;
    video[c] = canonical_sum(means) / static_cast<double>(frames.size());
  }
  return video;
}

}  // namespace rovf::encoders
