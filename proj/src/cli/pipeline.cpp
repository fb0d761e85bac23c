// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/cli/pipeline.hpp"

#include "rovf/core/random.hpp"
#include "rovf/model/embed.hpp"

namespace rovf::cli {

void read_ingest_config(const KeyValues& kv, ingest::IngestConfig& cfg) {
  kv.read("clip_seconds", cfg.clip_seconds);
  kv.read("fps", cfg.fps);
  if (auto s = kv.get("stagger_seconds")) cfg.stagger_seconds = ingest::Rational::parse(*s);
  kv.read("min_box", cfg.min_box);
  kv.read("resize_to", cfg.resize_to);
  kv.read("source_fps", cfg.source_fps);
}

void read_encoder_config(const KeyValues& kv, encoders::EncoderConfig& cfg) {
  if (auto s = kv.get("kind")) cfg.kind = encoders::encoder_kind_from_string(*s);
  kv.read("patch_size", cfg.patch_size);
  kv.read("d_model", cfg.d_model);
  kv.read("trainable", cfg.trainable);
  kv.read("resize_to", cfg.resize_to);
  kv.read("channels", cfg.channels);
}

void read_rovf_config(const KeyValues& kv, model::RoVFConfig& cfg) {
  kv.read("d_model", cfg.d_model);
  kv.read("n_latents", cfg.n_latents);
  kv.read("n_layers", cfg.n_layers);
  kv.read("n_heads", cfg.n_heads);
  kv.read("dropout", cfg.dropout);
  kv.read("d_ff", cfg.d_ff);
  kv.read("out_dim", cfg.out_dim);
}

std::uint64_t encoder_seed(std::uint64_t root) { return derive_seed(root, "encoder.init"); }
std::uint64_t model_seed(std::uint64_t root) { return derive_seed(root, "model.init"); }
std::uint64_t eval_seed(std::uint64_t root) { return derive_seed(root, "eval.sets"); }

std::vector<double> round_to_float(std::vector<double> v) {
  for (double& x : v) x = static_cast<float>(x);
  return v;
}

encoders::EmbeddingStore embed_manifest(const ingest::ClipManifest& manifest,
                                        const model::RoVFModel& model,
                                        const encoders::ClipEncoder& encoder) {
  std::vector<long> ids;
  ids.reserve(manifest.clips.size());
  for (const auto& c : manifest.clips) ids.push_back(c.clip_id);
  const Matrix emb = model::embed_clips(model, encoder, ids);
  encoders::EmbeddingStore store(static_cast<std::uint32_t>(emb.cols()));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto row = emb.row(i);
    store.insert_video(static_cast<std::uint64_t>(ids[i]), {row.begin(), row.end()});
  }
  return store;
}

std::vector<double> random_embedding(std::uint64_t seed, long clip_id, int dim) {
  Rng rng = make_rng(seed, "eval.random_embedding", {static_cast<std::uint64_t>(clip_id)});
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (double& x : v) x = normal(rng);
  return v;
}

}  // namespace rovf::cli
