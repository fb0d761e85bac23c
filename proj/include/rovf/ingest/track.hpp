// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rovf::ingest {

struct Box {
  long frame = 0;
  double x = 0.0;  // top-left corner, pixels
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  bool occluded = false;

  double cx() const noexcept { return x + w / 2.0; }
  double cy() const noexcept { return y + h / 2.0; }
  double max_side() const noexcept { return w > h ? w : h; }

  friend bool operator==(const Box&, const Box&) = default;
};

/// Track ids are assigned per annotated trajectory and are only unique within
/// one video, so tracks are identified by (video_id, track_id).
struct TrackKey {
  int video_id = 0;
  int track_id = 0;

  friend auto operator<=>(const TrackKey&, const TrackKey&) = default;
};

std::string to_string(const TrackKey& key);

struct Track {
  int track_id = 0;
  int video_id = 0;
  std::vector<Box> boxes;  // strictly increasing frame

  TrackKey key() const noexcept { return {video_id, track_id}; }
  /// Box at `frame`, or nullptr when the track has no box there.
  const Box* find(long frame) const noexcept;

  friend bool operator==(const Track&, const Track&) = default;
};

/// Throws ValidationError if frame order or box sizes are broken.
void validate_track(const Track& track);

/// Reads the track CSV (`video_id,frame,track_id,x,y,w,h,occluded` after one
/// header line). Rows of one track may be interleaved with other tracks and
/// appear in any frame order; tracks come back sorted by (video_id, track_id)
/// with boxes sorted by frame. Errors name the offending row.
std::vector<Track> parse_tracks(const std::filesystem::path& path);
std::vector<Track> parse_tracks(std::istream& in, const std::string& source_name);

void write_tracks(std::ostream& out, std::span<const Track> tracks);
void write_tracks(const std::filesystem::path& path, std::span<const Track> tracks);

/// Unordered pairs of tracks that appear together in at least one frame of
/// the same video. Symmetric and irreflexive by construction.
class CoOccurrenceGraph {
 public:
  using Edge = std::pair<TrackKey, TrackKey>;  // first < second

  void add(TrackKey a, TrackKey b);
  bool adjacent(TrackKey a, TrackKey b) const;
  const std::set<TrackKey>& neighbors(TrackKey key) const;
  const std::set<Edge>& edges() const noexcept { return edges_; }
  std::size_t size() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }

  friend bool operator==(const CoOccurrenceGraph& a, const CoOccurrenceGraph& b) {
    return a.edges_ == b.edges_;
  }

 private:
  std::set<Edge> edges_;
  std::map<TrackKey, std::set<TrackKey>> adjacency_;
};

CoOccurrenceGraph build_cooccurrence(std::span<const Track> tracks);

}  // namespace rovf::ingest
