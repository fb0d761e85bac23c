// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "rovf/ingest/track.hpp"

namespace rovf::ingest {

/// Exact positive rational, used for the window stagger so that window
/// offsets never accumulate float drift.
struct Rational {
  long num = 0;
  long den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
  static Rational parse(const std::string& text);

  friend bool operator==(const Rational&, const Rational&) = default;
};

struct IngestConfig {
  int clip_seconds = 10;
  int fps = 1;                      // clip sampling rate
  Rational stagger_seconds{10, 3};
  double min_box = 70.0;            // a window needs max(w, h) > min_box somewhere
  int resize_to = 224;
  int source_fps = 1;               // frame rate of the annotated video

  int frames_per_clip() const noexcept { return clip_seconds * fps; }
  /// Throws ValidationError on non-positive fields or stagger > clip length.
  void validate() const;

  friend bool operator==(const IngestConfig&, const IngestConfig&) = default;
};

struct CropCenter {
  double cx = 0.0;
  double cy = 0.0;
  friend bool operator==(const CropCenter&, const CropCenter&) = default;
};

struct ClipSpec {
  long clip_id = 0;
  int track_id = 0;
  int video_id = 0;
  long start_frame = 0;
  std::vector<long> frame_indices;
  double crop_side = 0.0;
  std::vector<CropCenter> crop_centers;

  TrackKey track_key() const noexcept { return {video_id, track_id}; }
  friend bool operator==(const ClipSpec&, const ClipSpec&) = default;
};

struct IngestStats {
  long n_tracks = 0;
  long n_boxes = 0;
  long n_windows = 0;                // candidate windows considered
  long n_rejected_visibility = 0;    // missing or occluded frame inside the window
  long n_rejected_small = 0;         // failed the min_box rule
  long n_clips = 0;
  std::vector<TrackKey> tracks_without_clips;
};

/// Number of candidate windows for a track spanning `n_frames` source frames:
/// max(0, floor((T - clip_seconds) / stagger) + 1) with T = n_frames / source_fps,
/// evaluated in integer arithmetic.
long window_count(long n_frames, const IngestConfig& cfg);

/// Source frame indices sampled by window `k` of a track whose first frame is
/// `first_frame` (round-to-nearest, ties up).
std::vector<long> window_frames(long first_frame, long k, const IngestConfig& cfg);

/// Cuts every track into staggered fixed-length windows and keeps those whose
/// sampled frames all exist unoccluded and whose largest box side exceeds
/// `cfg.min_box`. Clip ids are assigned sequentially in track order.
std::vector<ClipSpec> generate_clips(std::span<const Track> tracks, const IngestConfig& cfg,
                                     IngestStats* stats = nullptr);

/// Re-checks the ClipSpec invariants against its source track.
void validate_clip(const ClipSpec& clip, const Track& track, const IngestConfig& cfg);

}  // namespace rovf::ingest
