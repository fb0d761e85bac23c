// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <vector>

#include "rovf/ingest/frames.hpp"
#include "rovf/ingest/track.hpp"

namespace rovf::ingest {

struct SynthConfig {
  int n_identities = 10;
  double duration_s = 300.0;
  int n_videos = 1;
  std::uint64_t seed = 0;
  int width = 640;
  int height = 480;
  int source_fps = 1;
  double box_scale = 1.0;  // < 1 produces small boxes for the min_box filter

  long n_frames() const noexcept;
  void validate() const;
};

/// Procedural videos of textured blobs ("individuals") wandering over a
/// per-video background.
///
/// Each individual's look (body colour, stripe frequency/orientation, dark
/// mask band, body proportions) depends only on (seed, identity), so the same
/// individuals appear across all videos. Motion, visibility and occlusion
/// depend on (seed, video, identity). An individual is visible in segments of
/// 60-150 s separated by 3-8 s absences, and every segment becomes a separate
/// track, mimicking annotators that cannot re-identify returning animals.
/// All individuals start visible at frame 0, so individuals of one video
/// co-occur.
class SyntheticFrameProvider : public FrameProvider {
 public:
  explicit SyntheticFrameProvider(SynthConfig cfg);

  Image frame(int video_id, long frame_index) const override;

  const SynthConfig& config() const noexcept { return cfg_; }
  const std::vector<Track>& tracks() const noexcept { return tracks_; }
  /// Ground-truth identity behind each track.
  const std::map<TrackKey, int>& identities() const noexcept { return identity_; }

 private:
  struct Look {
    double body[3];
    double stripe[3];
    double stripe_freq;
    double stripe_angle;
    double stripe_phase;
    double mask_top;
    double mask_height;
    double size;
    double aspect;
  };
  struct State {
    bool visible = false;
    bool occluded = false;
    double x = 0, y = 0, w = 0, h = 0;
  };

  const State& state(int video, int identity, long frame) const;

  SynthConfig cfg_;
  std::vector<Look> looks_;
  std::vector<std::vector<std::uint8_t>> backgrounds_;  // per video, interleaved RGB
  std::vector<State> states_;  // [video][identity][frame]
  std::vector<Track> tracks_;
  std::map<TrackKey, int> identity_;
};

struct SynthWorld {
  SynthConfig config;
  std::vector<Track> tracks;
  std::map<TrackKey, int> identity;
  std::shared_ptr<const SyntheticFrameProvider> frames;
};

SynthWorld synth_tracks(const SynthConfig& cfg);
SynthWorld synth_tracks(int n_identities, double duration_s, std::uint64_t seed);

/// `synthetic.json` descriptor that lets a frames directory be re-rendered.
void write_synth_descriptor(const std::filesystem::path& path, const SynthConfig& cfg);
SynthConfig read_synth_descriptor(const std::filesystem::path& path);

}  // namespace rovf::ingest
