// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rovf/core/matrix.hpp"
#include "rovf/ingest/manifest.hpp"

namespace rovf::eval {

inline constexpr std::size_t kPositives = 2;
inline constexpr std::size_t kNegatives = 9;
inline constexpr std::size_t kGallerySize = kNegatives + 1;

struct EvalSet {
  ingest::TrackKey track;
  std::array<long, kPositives> positives{};
  std::array<long, kNegatives> negatives{};

  friend bool operator==(const EvalSet&, const EvalSet&) = default;
};

/// Optional geometric filter: drop sets whose two positive clips have crop
/// squares with mean IoU (over aligned frame positions) above `max_iou`.
struct SetFilter {
  bool enabled = false;
  double max_iou = 0.5;

  friend bool operator==(const SetFilter&, const SetFilter&) = default;
};

struct EvalSets {
  std::uint64_t seed = 0;
  SetFilter filter;
  std::vector<EvalSet> sets;

  friend bool operator==(const EvalSets&, const EvalSets&) = default;
};

/// Tracks with >= 2 clips and >= 9 clips among co-occurring tracks are
/// drawn uniformly; positives and negatives are drawn without replacement.
/// Negatives may share a track. Throws IneligibleDataset naming the binding
/// constraint when no track qualifies or the filter rejects too much.
EvalSets generate_eval_sets(const ingest::ClipManifest& manifest, std::size_t n_sets,
                            std::uint64_t seed, const SetFilter& filter = {});

/// Throws ValidationError unless the set is well formed for `manifest`.
void validate_eval_set(const ingest::ClipManifest& manifest, const EvalSet& set);

/// Mean IoU of the two clips' crop squares over aligned frame positions.
double crop_overlap(const ingest::ClipSpec& a, const ingest::ClipSpec& b);

/// Gallery indices by ascending Euclidean distance to `query`; ties keep the
/// lower index first.
std::vector<std::size_t> rank_gallery(std::span<const double> query, const Matrix& gallery);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval at 95%.
Interval wilson_interval(std::size_t hits, std::size_t n);

struct QueryRank {
  std::size_t set_id = 0;
  long query_clip = 0;
  std::size_t positive_rank = 0;  // 1-based
};

struct EvalReport {
  std::size_t n_sets = 0;
  std::size_t n_queries = 0;
  double top1 = 0.0;
  double top3 = 0.0;
  Interval top1_ci;
  Interval top3_ci;
  std::array<std::size_t, kGallerySize> hits_at{};  // hits_at[k-1] = queries with rank <= k
  std::vector<QueryRank> ranks;
  std::uint64_t seed = 0;
  SetFilter filter;
};

using EmbeddingTable = std::map<long, std::vector<double>>;

/// Every clip referenced by the sets, ascending and unique.
std::vector<long> referenced_clips(const EvalSets& sets);

/// Both positives of each set act as query in turn. The gallery is the other
/// positive plus the 9 negatives, with the positive at a slot drawn from the
/// set's seed, so a constant embedder scores at chance. Throws ValidationError
/// naming the clip if an embedding is missing, non-finite or mis-sized.
EvalReport evaluate(const EvalSets& sets, const EmbeddingTable& embeddings);
/// Calls `embedder` once per referenced clip; failures name the clip.
EvalReport evaluate(const EvalSets& sets, const std::function<std::vector<double>(long)>& embedder);

/// Position of the true match in the gallery of query `q` of set `set_id`.
std::size_t positive_slot(std::uint64_t seed, std::size_t set_id, std::size_t q);

std::string eval_sets_to_json(const EvalSets& sets);
EvalSets eval_sets_from_json(const std::string& text, const std::string& source_name);
void save_eval_sets(const std::filesystem::path& path, const EvalSets& sets);
EvalSets load_eval_sets(const std::filesystem::path& path);

std::string report_to_json(const EvalReport& report);
/// `set_id,query_clip,positive_rank`
void write_rank_table(std::ostream& out, const EvalReport& report);

}  // namespace rovf::eval
