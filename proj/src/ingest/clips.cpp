// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/ingest/clips.hpp"

#include <algorithm>
#include <charconv>

#include "rovf/core/error.hpp"

namespace rovf::ingest {

Rational Rational::parse(const std::string& text) {
  Rational r;
  const auto slash = text.find('/');
  auto parse_long = [&](std::string_view s) {
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
      throw ValidationError("invalid rational '" + text + "'");
    }
    return v;
  };
  if (slash == std::string::npos) {
    r.num = parse_long(text);
    r.den = 1;
  } else {
    r.num = parse_long(std::string_view(text).substr(0, slash));
    r.den = parse_long(std::string_view(text).substr(slash + 1));
  }
  if (r.den <= 0) throw ValidationError("invalid rational '" + text + "'");
  return r;
}

void IngestConfig::validate() const {
  if (clip_seconds <= 0 || fps <= 0 || source_fps <= 0 || resize_to <= 0) {
    throw ValidationError("ingest config: clip_seconds, fps, source_fps, resize_to must be > 0");
  }
  if (stagger_seconds.num <= 0 || stagger_seconds.den <= 0) {
    throw ValidationError("ingest config: stagger_seconds must be > 0");
  }
  if (!(min_box > 0.0)) throw ValidationError("ingest config: min_box must be > 0");
  // stagger <= clip_seconds
  if (stagger_seconds.num > static_cast<long>(clip_seconds) * stagger_seconds.den) {
    throw ValidationError("ingest config: stagger_seconds exceeds clip_seconds");
  }
}

long window_count(long n_frames, const IngestConfig& cfg) {
  // Window k fits iff k * num/den + C <= n_frames / sfps, i.e.
  // k * num * sfps <= (n_frames - C * sfps) * den.
  const long sfps = cfg.source_fps;
  const long slack = (n_frames - static_cast<long>(cfg.clip_seconds) * sfps) *
                     cfg.stagger_seconds.den;
  if (slack < 0) return 0;
  return slack / (cfg.stagger_seconds.num * sfps) + 1;
}

std::vector<long> window_frames(long first_frame, long k, const IngestConfig& cfg) {
  // time(s) = k * num/den + s/fps, frame = round(time * sfps)
  //         = round((k * num * fps + s * den) * sfps / (den * fps))
  const long den = cfg.stagger_seconds.den * cfg.fps;
  std::vector<long> frames(static_cast<std::size_t>(cfg.frames_per_clip()));
  for (long s = 0; s < cfg.frames_per_clip(); ++s) {
    const long numer =
        (k * cfg.stagger_seconds.num * cfg.fps + s * cfg.stagger_seconds.den) * cfg.source_fps;
    frames[static_cast<std::size_t>(s)] = first_frame + (2 * numer + den) / (2 * den);
  }
  return frames;
}

std::vector<ClipSpec> generate_clips(std::span<const Track> tracks, const IngestConfig& cfg,
                                     IngestStats* stats) {
  cfg.validate();
  IngestStats local;
  IngestStats& st = stats ? *stats : local;
  st = IngestStats{};
  std::vector<ClipSpec> clips;
  for (const Track& track : tracks) {
    ++st.n_tracks;
    st.n_boxes += static_cast<long>(track.boxes.size());
    long emitted = 0;
    if (!track.boxes.empty()) {
      const long first = track.boxes.front().frame;
      const long span = track.boxes.back().frame - first + 1;
      const long n_windows = window_count(span, cfg);
      for (long k = 0; k < n_windows; ++k) {
        ++st.n_windows;
        std::vector<long> frames = window_frames(first, k, cfg);
        ClipSpec clip;
        clip.crop_centers.reserve(frames.size());
        bool visible = true;
        double side = 0.0;
        for (long f : frames) {
          const Box* b = track.find(f);
          if (b == nullptr || b->occluded) {
            visible = false;
            break;
          }
          side = std::max(side, b->max_side());
          clip.crop_centers.push_back({b->cx(), b->cy()});
        }
        if (!visible) {
          ++st.n_rejected_visibility;
          continue;
        }
        if (!(side > cfg.min_box)) {
          ++st.n_rejected_small;
          continue;
        }
        clip.clip_id = static_cast<long>(clips.size());
        clip.track_id = track.track_id;
        clip.video_id = track.video_id;
        clip.start_frame = frames.front();
        clip.frame_indices = std::move(frames);
        clip.crop_side = side;
        clips.push_back(std::move(clip));
        ++emitted;
      }
    }
    if (emitted == 0) st.tracks_without_clips.push_back(track.key());
  }
  st.n_clips = static_cast<long>(clips.size());
  return clips;
}

void validate_clip(const ClipSpec& clip, const Track& track, const IngestConfig& cfg) {
  const std::string where = "clip " + std::to_string(clip.clip_id);
  if (clip.track_key() != track.key()) throw ValidationError(where + ": track mismatch");
  if (static_cast<int>(clip.frame_indices.size()) != cfg.frames_per_clip()) {
    throw ValidationError(where + ": frame count " + std::to_string(clip.frame_indices.size()) +
                          " != " + std::to_string(cfg.frames_per_clip()));
  }
  if (clip.crop_centers.size() != clip.frame_indices.size()) {
    throw ValidationError(where + ": crop center count mismatch");
  }
  if (clip.frame_indices.empty() || clip.start_frame != clip.frame_indices.front()) {
    throw ValidationError(where + ": start_frame mismatch");
  }
  double side = 0.0;
  for (std::size_t i = 0; i < clip.frame_indices.size(); ++i) {
    const Box* b = track.find(clip.frame_indices[i]);
    if (b == nullptr) {
      throw ValidationError(where + ": frame " + std::to_string(clip.frame_indices[i]) +
                            " not in track");
    }
    if (b->occluded) {
      throw ValidationError(where + ": frame " + std::to_string(clip.frame_indices[i]) +
                            " is occluded");
    }
    if (clip.crop_centers[i] != CropCenter{b->cx(), b->cy()}) {
      throw ValidationError(where + ": crop center mismatch at frame " +
                            std::to_string(clip.frame_indices[i]));
    }
    side = std::max(side, b->max_side());
  }
  if (side != clip.crop_side) throw ValidationError(where + ": crop_side mismatch");
}

}  // namespace rovf::ingest
