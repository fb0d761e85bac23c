// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "rovf/core/keyvalue.hpp"
#include "rovf/encoders/clip_encoder.hpp"
#include "rovf/encoders/embedding_store.hpp"
#include "rovf/ingest/manifest.hpp"
#include "rovf/model/rovf.hpp"

namespace rovf::cli {

// Config readers. Keys are the field names of the corresponding types;
// `d_model` feeds both the encoder and the head.
void read_ingest_config(const KeyValues& kv, ingest::IngestConfig& cfg);
void read_encoder_config(const KeyValues& kv, encoders::EncoderConfig& cfg);
void read_rovf_config(const KeyValues& kv, model::RoVFConfig& cfg);

// Seed streams derived from the single root seed.
std::uint64_t encoder_seed(std::uint64_t root);
std::uint64_t model_seed(std::uint64_t root);
std::uint64_t eval_seed(std::uint64_t root);

/// Embedding files hold float32, so in-process evaluation rounds the same
/// way to stay identical to evaluating a written embedding file.
std::vector<double> round_to_float(std::vector<double> v);

/// Eval-mode video embeddings of every clip in `manifest`, stored video-level.
encoders::EmbeddingStore embed_manifest(const ingest::ClipManifest& manifest,
                                        const model::RoVFModel& model,
                                        const encoders::ClipEncoder& encoder);

/// i.i.d. N(0, 1) vector of width `dim` that depends only on (seed, clip).
std::vector<double> random_embedding(std::uint64_t seed, long clip_id, int dim);

}  // namespace rovf::cli
