// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rovf/ingest/clips.hpp"
#include "rovf/ingest/track.hpp"

namespace rovf::ingest {

/// Clips, their provenance and the co-occurrence graph of one ingest run.
struct ClipManifest {
  IngestConfig config;
  std::vector<ClipSpec> clips;
  CoOccurrenceGraph graph;
  IngestStats stats;

  /// Positions in `clips` grouped by track, in clip order.
  std::map<TrackKey, std::vector<std::size_t>> clips_by_track() const;
  /// Position in `clips` of a clip id; throws ValidationError if absent.
  std::size_t index_of(long clip_id) const;
};

ClipManifest make_manifest(std::span<const Track> tracks, const IngestConfig& cfg);

/// Tracks usable as anchors: at least `min_clips` clips of their own and at
/// least one clip among co-occurring tracks.
std::vector<TrackKey> anchor_eligible_tracks(const ClipManifest& manifest, std::size_t min_clips);

inline constexpr std::size_t kMinAnchorClips = 3;

std::string manifest_to_json(const ClipManifest& manifest);
ClipManifest manifest_from_json(const std::string& text, const std::string& source_name);

void save_manifest(const std::filesystem::path& path, const ClipManifest& manifest);
/// Verifies the embedded checksum; throws FormatError on mismatch.
ClipManifest load_manifest(const std::filesystem::path& path);

}  // namespace rovf::ingest
