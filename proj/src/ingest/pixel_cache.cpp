// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/ingest/pixel_cache.hpp"

#include <exception>
#include <map>
#include <mutex>

namespace rovf::ingest {

PixelCache PixelCache::build(const ClipManifest& manifest, const FrameProvider& source) {
  const int side = manifest.config.resize_to;
  std::vector<ClipPixels> blocks(manifest.clips.size());
  // Overlapping clips share source frames, so work is grouped by frame and
  // every frame is decoded (or rendered) once.
  struct Slot {
    std::size_t clip;
    std::size_t position;
  };
  std::map<std::pair<int, long>, std::vector<Slot>> by_frame;
  for (std::size_t c = 0; c < manifest.clips.size(); ++c) {
    const ClipSpec& clip = manifest.clips[c];
    ClipPixels& b = blocks[c];
    b.frames = static_cast<int>(clip.frame_indices.size());
    b.side = side;
    b.channels = 3;
    b.data.resize(b.frame_size() * static_cast<std::size_t>(b.frames));
    for (std::size_t i = 0; i < clip.frame_indices.size(); ++i) {
      by_frame[{clip.video_id, clip.frame_indices[i]}].push_back({c, i});
    }
  }
  std::vector<const std::vector<Slot>*> groups;
  groups.reserve(by_frame.size());
  for (const auto& [key, slots] : by_frame) groups.push_back(&slots);

  std::exception_ptr failure;
  long long failed_at = -1;
  std::mutex failure_mutex;
  const auto n = static_cast<long long>(groups.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long long g = 0; g < n; ++g) {
    try {
      const std::vector<Slot>& slots = *groups[static_cast<std::size_t>(g)];
      const ClipSpec& first = manifest.clips[slots.front().clip];
      const Image img = load_clip_frame(first, slots.front().position, source);
      for (const Slot& s : slots) {
        ClipPixels& b = blocks[s.clip];
        crop_frame_into(img, manifest.clips[s.clip], s.position, side,
                        std::span<float>(b.data).subspan(s.position * b.frame_size(),
                                                         b.frame_size()));
      }
    } catch (...) {
      // Keep the first failing frame in (video, frame) order.
      std::lock_guard lock(failure_mutex);
      if (failed_at < 0 || g < failed_at) {
        failed_at = g;
        failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  PixelCache cache;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    cache.blocks_.emplace(manifest.clips[i].clip_id, std::move(blocks[i]));
  }
  return cache;
}

const ClipPixels& PixelCache::at(long clip_id) const {
  auto it = blocks_.find(clip_id);
  if (it == blocks_.end()) {
    throw ValidationError("pixel cache has no clip " + std::to_string(clip_id));
  }
  return it->second;
}

}  // namespace rovf::ingest
