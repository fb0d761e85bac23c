// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/ingest/track.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "rovf/core/error.hpp"

namespace rovf::ingest {

std::string to_string(const TrackKey& key) {
  return "video " + std::to_string(key.video_id) + " track " + std::to_string(key.track_id);
}

const Box* Track::find(long frame) const noexcept {
  auto it = std::lower_bound(boxes.begin(), boxes.end(), frame,
                             [](const Box& b, long f) { return b.frame < f; });
  if (it == boxes.end() || it->frame != frame) return nullptr;
  return &*it;
}

void validate_track(const Track& track) {
  for (std::size_t i = 0; i < track.boxes.size(); ++i) {
    const Box& b = track.boxes[i];
    if (!(b.w > 0.0) || !(b.h > 0.0)) {
      throw ValidationError(to_string(track.key()) + ": non-positive box size at frame " +
                            std::to_string(b.frame));
    }
    if (i > 0 && b.frame <= track.boxes[i - 1].frame) {
      throw ValidationError(to_string(track.key()) + ": non-increasing frame index " +
                            std::to_string(b.frame));
    }
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T parse_number(std::string_view field, const char* name, const std::string& source, long row) {
  field = trim(field);
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(source, row,
                     std::string("field '") + name + "' is not numeric: '" + std::string(field) +
                         "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) {
      throw ParseError(source, row, std::string("field '") + name + "' is not finite");
    }
  }
  return value;
}

struct PendingBox {
  Box box;
  long row;
};

}  // namespace

std::vector<Track> parse_tracks(std::istream& in, const std::string& source_name) {
  static constexpr const char* kFields[] = {"video_id", "frame", "track_id", "x",
                                            "y",        "w",     "h",        "occluded"};
  std::map<TrackKey, std::vector<PendingBox>> grouped;
  std::string line;
  long row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = view.find(',', start);
      fields.push_back(view.substr(start, comma == std::string_view::npos ? view.npos
                                                                           : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 8) {
      throw ParseError(source_name, row,
                       "expected 8 fields, found " + std::to_string(fields.size()));
    }
    TrackKey key{parse_number<int>(fields[0], kFields[0], source_name, row),
                 parse_number<int>(fields[2], kFields[2], source_name, row)};
    Box b;
    b.frame = parse_number<long>(fields[1], kFields[1], source_name, row);
    b.x = parse_number<double>(fields[3], kFields[3], source_name, row);
    b.y = parse_number<double>(fields[4], kFields[4], source_name, row);
    b.w = parse_number<double>(fields[5], kFields[5], source_name, row);
    b.h = parse_number<double>(fields[6], kFields[6], source_name, row);
    const int occ = parse_number<int>(fields[7], kFields[7], source_name, row);
    if (b.frame < 0) throw ParseError(source_name, row, "negative frame index");
    if (b.w <= 0.0 || b.h <= 0.0) {
      throw ParseError(source_name, row, "width and height must be positive");
    }
    if (occ != 0 && occ != 1) throw ParseError(source_name, row, "occluded must be 0 or 1");
    b.occluded = occ == 1;
    grouped[key].push_back({b, row});
  }
  if (!header_seen) throw ParseError(source_name, row, "missing header line");

  std::vector<Track> tracks;
  tracks.reserve(grouped.size());
  for (auto& [key, pending] : grouped) {
    std::stable_sort(pending.begin(), pending.end(), [](const PendingBox& a, const PendingBox& b) {
      return a.box.frame < b.box.frame;
    });
    Track t;
    t.video_id = key.video_id;
    t.track_id = key.track_id;
    t.boxes.reserve(pending.size());
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (i > 0 && pending[i].box.frame == pending[i - 1].box.frame) {
        throw ParseError(source_name, pending[i].row,
                         "non-increasing frame index " + std::to_string(pending[i].box.frame) +
                             " for " + to_string(key) + " (also on row " +
                             std::to_string(pending[i - 1].row) + ")");
      }
      t.boxes.push_back(pending[i].box);
    }
    tracks.push_back(std::move(t));
  }
  return tracks;
}

std::vector<Track> parse_tracks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open track file " + path.string());
  return parse_tracks(in, path.string());
}

void write_tracks(std::ostream& out, std::span<const Track> tracks) {
  out << "video_id,frame,track_id,x,y,w,h,occluded\n";
  char buf[64];
  auto num = [&](double v) {
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string_view(buf, static_cast<std::size_t>(p - buf));
  };
  for (const Track& t : tracks) {
    for (const Box& b : t.boxes) {
      out << t.video_id << ',' << b.frame << ',' << t.track_id << ',' << num(b.x) << ',';
      out << num(b.y) << ',';
      out << num(b.w) << ',';
      out << num(b.h) << ',' << (b.occluded ? 1 : 0) << '\n';
    }
  }
}

void write_tracks(const std::filesystem::path& path, std::span<const Track> tracks) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_tracks(out, tracks);
}

void CoOccurrenceGraph::add(TrackKey a, TrackKey b) {
  if (a == b) return;
  if (b < a) std::swap(a, b);
  if (edges_.emplace(a, b).second) {
    adjacency_[a].insert(b);
    adjacency_[b].insert(a);
  }
}

bool CoOccurrenceGraph::adjacent(TrackKey a, TrackKey b) const {
  if (b < a) std::swap(a, b);
  return edges_.contains({a, b});
}

const std::set<TrackKey>& CoOccurrenceGraph::neighbors(TrackKey key) const {
  static const std::set<TrackKey> kEmpty;
  auto it = adjacency_.find(key);
  return it == adjacency_.end() ? kEmpty : it->second;
}

CoOccurrenceGraph build_cooccurrence(std::span<const Track> tracks) {
  // Bucket track keys per (video, frame); every bucket is a clique.
  std::map<std::pair<int, long>, std::vector<TrackKey>> present;
  for (const Track& t : tracks) {
    for (const Box& b : t.boxes) present[{t.video_id, b.frame}].push_back(t.key());
  }
  CoOccurrenceGraph graph;
  for (const auto& [slot, keys] : present) {
    for (std::size_t i = 0; i < keys.size(); ++i) {
      for (std::size_t j = i + 1; j < keys.size(); ++j) graph.add(keys[i], keys[j]);
    }
  }
  return graph;
}

}  // namespace rovf::ingest
