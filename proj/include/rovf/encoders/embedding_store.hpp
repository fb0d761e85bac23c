// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rovf/encoders/frame_tokens.hpp"

namespace rovf::encoders {

/// Embeddings of one clip as float32 in (frame, token, dim) order.
struct ClipEmbedding {
  std::uint32_t n_frames = 0;
  std::uint32_t n_tokens = 0;
  std::vector<float> values;

  friend bool operator==(const ClipEmbedding&, const ClipEmbedding&) = default;
};

/// Per-clip frame embeddings keyed by clip id, iterated in ascending clip id.
///
/// On disk (all integers and floats little-endian):
///   "RVFE" | u16 version = 1 | u32 d_model | u32 n_clips |
///   n_clips x ( u64 clip_id | u32 n_frames | u32 n_tokens |
///               n_frames * n_tokens * d_model x f32 )
/// Video-level embeddings are stored with n_frames = n_tokens = 1.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(std::uint32_t d_model) : d_model_(d_model) {}

  std::uint32_t d_model() const noexcept { return d_model_; }
  std::size_t size() const noexcept { return clips_.size(); }
  bool contains(std::uint64_t clip_id) const { return clips_.contains(clip_id); }

  /// Throws ValidationError on size disagreement or a duplicate id.
  void insert(std::uint64_t clip_id, ClipEmbedding clip);
  void insert_video(std::uint64_t clip_id, const std::vector<double>& embedding);

  const ClipEmbedding& at(std::uint64_t clip_id) const;
  FrameTokens frame_tokens(std::uint64_t clip_id, std::uint32_t frame_position) const;
  /// Video embedding of a clip stored with one frame and one token.
  std::vector<double> video_embedding(std::uint64_t clip_id) const;
  bool is_video_level() const;

  const std::map<std::uint64_t, ClipEmbedding>& clips() const noexcept { return clips_; }

  friend bool operator==(const EmbeddingStore&, const EmbeddingStore&) = default;

 private:
  std::uint32_t d_model_ = 0;
  std::map<std::uint64_t, ClipEmbedding> clips_;
};

std::string serialize_embeddings(const EmbeddingStore& store);
EmbeddingStore deserialize_embeddings(std::string_view bytes, const std::string& source_name);

void save_embeddings(const std::filesystem::path& path, const EmbeddingStore& store);
EmbeddingStore import_embeddings(const std::filesystem::path& path);

}  // namespace rovf::encoders
