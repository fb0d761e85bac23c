// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/encoders/embedding_store.hpp"

#include <bit>
#include <cstring>

#include "rovf/core/digest.hpp"
#include "rovf/core/error.hpp"

namespace rovf::encoders {

namespace {

constexpr char kMagic[4] = {'R', 'V', 'F', 'E'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
  }
}

void put_f32(std::string& out, float f) { put(out, std::bit_cast<std::uint32_t>(f)); }

class Reader {
 public:
  Reader(std::string_view bytes, const std::string& source) : bytes_(bytes), source_(source) {}

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(source_ + ": truncated payload while reading " + what + " at byte " +
                        std::to_string(pos_));
    }
  }

  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    auto view = bytes_.substr(pos_, n);
    pos_ += n;
    return view;
  }

  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
  const std::string& source_;
};

}  // namespace

void EmbeddingStore::insert(std::uint64_t clip_id, ClipEmbedding clip) {
  const std::size_t expected =
      static_cast<std::size_t>(clip.n_frames) * clip.n_tokens * d_model_;
  if (clip.values.size() != expected) {
    throw ValidationError("embedding store: clip " + std::to_string(clip_id) + " has " +
                          std::to_string(clip.values.size()) + " values, expected " +
                          std::to_string(expected) + " for d_model " + std::to_string(d_model_));
  }
  if (!clips_.emplace(clip_id, std::move(clip)).second) {
    throw ValidationError("embedding store: duplicate clip " + std::to_string(clip_id));
  }
}

void EmbeddingStore::insert_video(std::uint64_t clip_id, const std::vector<double>& embedding) {
  ClipEmbedding clip;
  clip.n_frames = 1;
  clip.n_tokens = 1;
  clip.values.assign(embedding.begin(), embedding.end());
  insert(clip_id, std::move(clip));
}

const ClipEmbedding& EmbeddingStore::at(std::uint64_t clip_id) const {
  auto it = clips_.find(clip_id);
  if (it == clips_.end()) {
    throw ValidationError("embedding store has no clip " + std::to_string(clip_id));
  }
  return it->second;
}

FrameTokens EmbeddingStore::frame_tokens(std::uint64_t clip_id,
                                         std::uint32_t frame_position) const {
  const ClipEmbedding& clip = at(clip_id);
  if (frame_position >= clip.n_frames) {
    throw ValidationError("embedding store: clip " + std::to_string(clip_id) + " has no frame " +
                          std::to_string(frame_position) + " (" + std::to_string(clip.n_frames) +
                          " frames)");
  }
  FrameTokens ft{Matrix(clip.n_tokens, d_model_)};
  const std::size_t stride = static_cast<std::size_t>(clip.n_tokens) * d_model_;
  const float* src = clip.values.data() + stride * frame_position;
  auto dst = ft.tokens.values();
  for (std::size_t i = 0; i < stride; ++i) dst[i] = src[i];
  return ft;
}

std::vector<double> EmbeddingStore::video_embedding(std::uint64_t clip_id) const {
  const ClipEmbedding& clip = at(clip_id);
  if (clip.n_frames != 1 || clip.n_tokens != 1) {
    throw ValidationError("embedding store: clip " + std::to_string(clip_id) +
                          " holds frame-level embeddings, not a video embedding");
  }
  return {clip.values.begin(), clip.values.end()};
}

bool EmbeddingStore::is_video_level() const {
  for (const auto& [id, clip] : clips_) {
    if (clip.n_frames != 1 || clip.n_tokens != 1) return false;
  }
  return true;
}

std::string serialize_embeddings(const EmbeddingStore& store) {
  std::string out(kMagic, 4);
  put<std::uint16_t>(out, kVersion);
  put<std::uint32_t>(out, store.d_model());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(store.size()));
  for (const auto& [id, clip] : store.clips()) {
    put<std::uint64_t>(out, id);
    put<std::uint32_t>(out, clip.n_frames);
    put<std::uint32_t>(out, clip.n_tokens);
    for (float f : clip.values) put_f32(out, f);
  }
  return out;
}

EmbeddingStore deserialize_embeddings(std::string_view bytes, const std::string& source_name) {
  Reader in(bytes, source_name);
  const auto magic = in.take(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) {
    throw FormatError(source_name + ": bad magic, not an RVFE embedding file");
  }
  const auto version = in.get<std::uint16_t>("version");
  if (version != kVersion) {
    throw FormatError(source_name + ": unsupported RVFE version " + std::to_string(version));
  }
  const auto d_model = in.get<std::uint32_t>("d_model");
  const auto n_clips = in.get<std::uint32_t>("n_clips");
  if (d_model == 0) throw FormatError(source_name + ": d_model is zero");
  EmbeddingStore store(d_model);
  for (std::uint32_t c = 0; c < n_clips; ++c) {
    const auto id = in.get<std::uint64_t>("clip_id");
    ClipEmbedding clip;
    clip.n_frames = in.get<std::uint32_t>("n_frames");
    clip.n_tokens = in.get<std::uint32_t>("n_tokens");
    if (clip.n_frames == 0 || clip.n_tokens == 0) {
      throw FormatError(source_name + ": clip " + std::to_string(id) +
                        " declares zero frames or tokens");
    }
    const std::size_t count = static_cast<std::size_t>(clip.n_frames) * clip.n_tokens * d_model;
    in.need(count * 4, "clip payload");
    clip.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      clip.values[i] = std::bit_cast<float>(in.get<std::uint32_t>("value"));
    }
    try {
      store.insert(id, std::move(clip));
    } catch (const ValidationError& e) {
      throw FormatError(source_name + ": " + e.what());
    }
  }
  if (!in.done()) {
    throw FormatError(source_name + ": trailing bytes after " + std::to_string(n_clips) +
                      " clips (dimension disagreement with header?)");
  }
  return store;
}

void save_embeddings(const std::filesystem::path& path, const EmbeddingStore& store) {
  write_file(path, serialize_embeddings(store));
}

EmbeddingStore import_embeddings(const std::filesystem::path& path) {
  return deserialize_embeddings(read_file(path), path.string());
}

}  // namespace rovf::encoders
