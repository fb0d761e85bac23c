// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/ingest/manifest.hpp"

#include <algorithm>

#include <json.hpp>

#include "rovf/core/digest.hpp"
#include "rovf/core/error.hpp"

namespace rovf::ingest {

using Json = nlohmann::ordered_json;

std::map<TrackKey, std::vector<std::size_t>> ClipManifest::clips_by_track() const {
  std::map<TrackKey, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < clips.size(); ++i) out[clips[i].track_key()].push_back(i);
  return out;
}

std::size_t ClipManifest::index_of(long clip_id) const {
  // Clip ids are sequential from generate_clips, but manifests may be filtered.
  if (clip_id >= 0 && static_cast<std::size_t>(clip_id) < clips.size() &&
      clips[static_cast<std::size_t>(clip_id)].clip_id == clip_id) {
    return static_cast<std::size_t>(clip_id);
  }
  for (std::size_t i = 0; i < clips.size(); ++i) {
    if (clips[i].clip_id == clip_id) return i;
  }
  throw ValidationError("clip " + std::to_string(clip_id) + " is not in the manifest");
}

ClipManifest make_manifest(std::span<const Track> tracks, const IngestConfig& cfg) {
  for (const Track& t : tracks) validate_track(t);
  ClipManifest m;
  m.config = cfg;
  m.clips = generate_clips(tracks, cfg, &m.stats);
  m.graph = build_cooccurrence(tracks);
  return m;
}

std::vector<TrackKey> anchor_eligible_tracks(const ClipManifest& manifest,
                                             std::size_t min_clips) {
  const auto by_track = manifest.clips_by_track();
  std::vector<TrackKey> eligible;
  for (const auto& [key, positions] : by_track) {
    if (positions.size() < min_clips) continue;
    bool has_negative = false;
    for (const TrackKey& other : manifest.graph.neighbors(key)) {
      if (by_track.contains(other)) {
        has_negative = true;
        break;
      }
    }
    if (has_negative) eligible.push_back(key);
  }
  return eligible;
}

namespace {

Json config_json(const IngestConfig& c) {
  Json j;
  j["clip_seconds"] = c.clip_seconds;
  j["fps"] = c.fps;
  j["stagger_seconds"] = c.stagger_seconds.str();
  j["min_box"] = c.min_box;
  j["resize_to"] = c.resize_to;
  j["source_fps"] = c.source_fps;
  return j;
}

Json key_json(const TrackKey& k) { return Json::array({k.video_id, k.track_id}); }

Json body_json(const ClipManifest& m) {
  Json root;
  root["config"] = config_json(m.config);
  Json clips = Json::array();
  for (const ClipSpec& c : m.clips) {
    Json jc;
    jc["clip_id"] = c.clip_id;
    jc["track_id"] = c.track_id;
    jc["video_id"] = c.video_id;
    jc["start_frame"] = c.start_frame;
    jc["frame_indices"] = c.frame_indices;
    jc["crop_side"] = c.crop_side;
    Json centers = Json::array();
    for (const CropCenter& cc : c.crop_centers) centers.push_back(Json::array({cc.cx, cc.cy}));
    jc["crop_centers"] = std::move(centers);
    clips.push_back(std::move(jc));
  }
  root["clips"] = std::move(clips);
  Json edges = Json::array();
  for (const auto& [a, b] : m.graph.edges()) {
    edges.push_back(Json::array({a.video_id, a.track_id, b.track_id}));
  }
  root["cooccurrence"] = std::move(edges);
  const auto eligible = anchor_eligible_tracks(m, kMinAnchorClips);
  Json stats;
  stats["n_tracks"] = m.stats.n_tracks;
  stats["n_boxes"] = m.stats.n_boxes;
  stats["n_windows"] = m.stats.n_windows;
  stats["n_rejected_visibility"] = m.stats.n_rejected_visibility;
  stats["n_rejected_small"] = m.stats.n_rejected_small;
  stats["n_clips"] = m.stats.n_clips;
  Json without = Json::array();
  for (const TrackKey& k : m.stats.tracks_without_clips) without.push_back(key_json(k));
  stats["tracks_without_clips"] = std::move(without);
  stats["n_cooccurrence_edges"] = m.graph.size();
  stats["n_anchor_eligible_tracks"] = eligible.size();
  stats["mining_eligible"] = !eligible.empty();
  if (eligible.empty()) {
    stats["mining_note"] =
        "no track has >= 3 clips and a co-occurring track with clips; no negatives can be mined";
  }
  root["stats"] = std::move(stats);
  return root;
}

}  // namespace

std::string manifest_to_json(const ClipManifest& manifest) {
  Json body = body_json(manifest);
  const std::string checksum = sha256_hex(body.dump());
  body["checksum"] = checksum;
  return body.dump(1) + "\n";
}

ClipManifest manifest_from_json(const std::string& text, const std::string& source_name) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::exception& e) {
    throw FormatError(source_name + ": " + e.what());
  }
  ClipManifest m;
  try {
    const Json& c = root.at("config");
    m.config.clip_seconds = c.at("clip_seconds").get<int>();
    m.config.fps = c.at("fps").get<int>();
    m.config.stagger_seconds = Rational::parse(c.at("stagger_seconds").get<std::string>());
    m.config.min_box = c.at("min_box").get<double>();
    m.config.resize_to = c.at("resize_to").get<int>();
    m.config.source_fps = c.value("source_fps", 1);
    m.config.validate();
    for (const Json& jc : root.at("clips")) {
      ClipSpec clip;
      clip.clip_id = jc.at("clip_id").get<long>();
      clip.track_id = jc.at("track_id").get<int>();
      clip.video_id = jc.at("video_id").get<int>();
      clip.start_frame = jc.at("start_frame").get<long>();
      clip.frame_indices = jc.at("frame_indices").get<std::vector<long>>();
      clip.crop_side = jc.at("crop_side").get<double>();
      for (const Json& cc : jc.at("crop_centers")) {
        clip.crop_centers.push_back({cc.at(0).get<double>(), cc.at(1).get<double>()});
      }
      if (static_cast<int>(clip.frame_indices.size()) != m.config.frames_per_clip() ||
          clip.crop_centers.size() != clip.frame_indices.size()) {
        throw FormatError(source_name + ": clip " + std::to_string(clip.clip_id) +
                          " has the wrong number of frames");
      }
      m.clips.push_back(std::move(clip));
    }
    for (const Json& e : root.at("cooccurrence")) {
      const int video = e.at(0).get<int>();
      m.graph.add({video, e.at(1).get<int>()}, {video, e.at(2).get<int>()});
    }
    const Json& s = root.at("stats");
    m.stats.n_tracks = s.at("n_tracks").get<long>();
    m.stats.n_boxes = s.at("n_boxes").get<long>();
    m.stats.n_windows = s.at("n_windows").get<long>();
    m.stats.n_rejected_visibility = s.at("n_rejected_visibility").get<long>();
    m.stats.n_rejected_small = s.at("n_rejected_small").get<long>();
    m.stats.n_clips = s.at("n_clips").get<long>();
    for (const Json& k : s.at("tracks_without_clips")) {
      m.stats.tracks_without_clips.push_back({k.at(0).get<int>(), k.at(1).get<int>()});
    }
  } catch (const Json::exception& e) {
    throw FormatError(source_name + ": malformed manifest: " + e.what());
  }
  if (!root.contains("checksum") || !root["checksum"].is_string()) {
    throw FormatError(source_name + ": manifest has no checksum");
  }
  const std::string stored = root["checksum"].get<std::string>();
  root.erase("checksum");
  if (sha256_hex(root.dump()) != stored) {
    throw FormatError(source_name + ": manifest checksum mismatch");
  }
  return m;
}

void save_manifest(const std::filesystem::path& path, const ClipManifest& manifest) {
  write_file(path, manifest_to_json(manifest));
}

ClipManifest load_manifest(const std::filesystem::path& path) {
  return manifest_from_json(read_file(path), path.string());
}

}  // namespace rovf::ingest
