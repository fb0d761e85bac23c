// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <unordered_map>

#include "rovf/ingest/frames.hpp"
#include "rovf/ingest/manifest.hpp"

namespace rovf::ingest {

/// Cropped and resized pixel blocks for every clip of a manifest.
class PixelCache {
 public:
  /// Crops all clips, in parallel over distinct source frames.
  static PixelCache build(const ClipManifest& manifest, const FrameProvider& source);

  const ClipPixels& at(long clip_id) const;
  bool contains(long clip_id) const { return blocks_.contains(clip_id); }
  std::size_t size() const noexcept { return blocks_.size(); }

 private:
  std::unordered_map<long, ClipPixels> blocks_;
};

}  // namespace rovf::ingest
