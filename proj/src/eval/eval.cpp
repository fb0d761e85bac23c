// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/eval/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <json.hpp>

#include "rovf/core/digest.hpp"
#include "rovf/core/error.hpp"
#include "rovf/core/kernels.hpp"
#include "rovf/core/random.hpp"

namespace rovf::eval {

using Json = nlohmann::ordered_json;

namespace {

constexpr std::size_t kMaxAttemptsPerSet = 1000;

double square_iou(const ingest::CropCenter& a, double side_a, const ingest::CropCenter& b,
                  double side_b) {
  auto overlap = [](double c1, double s1, double c2, double s2) {
    const double lo = std::max(c1 - s1 / 2, c2 - s2 / 2);
    const double hi = std::min(c1 + s1 / 2, c2 + s2 / 2);
    return std::max(hi - lo, 0.0);
  };
  const double inter = overlap(a.cx, side_a, b.cx, side_b) * overlap(a.cy, side_a, b.cy, side_b);
  const double uni = side_a * side_a + side_b * side_b - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace

double crop_overlap(const ingest::ClipSpec& a, const ingest::ClipSpec& b) {
  const std::size_t n = std::min(a.crop_centers.size(), b.crop_centers.size());
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += square_iou(a.crop_centers[i], a.crop_side, b.crop_centers[i], b.crop_side);
  }
  return sum / static_cast<double>(n);
}

EvalSets generate_eval_sets(const ingest::ClipManifest& manifest, std::size_t n_sets,
                            std::uint64_t seed, const SetFilter& filter) {
  if (n_sets == 0) throw ValidationError("generate_eval_sets: n_sets must be >= 1");
  std::map<ingest::TrackKey, std::vector<long>> clips;
  for (const auto& c : manifest.clips) clips[c.track_key()].push_back(c.clip_id);

  struct Candidate {
    ingest::TrackKey key;
    std::vector<long> pool;
  };
  std::vector<Candidate> eligible;
  std::size_t with_two = 0, best_pool = 0;
  for (const auto& [key, own] : clips) {
    if (own.size() < kPositives) continue;
    ++with_two;
    std::vector<long> pool;
    for (const auto& other : manifest.graph.neighbors(key)) {
      if (auto it = clips.find(other); it != clips.end()) {
        pool.insert(pool.end(), it->second.begin(), it->second.end());
      }
    }
    best_pool = std::max(best_pool, pool.size());
    if (pool.size() >= kNegatives) eligible.push_back({key, std::move(pool)});
  }
  if (with_two == 0) {
    throw IneligibleDataset("cannot build eval sets: no track has 2 or more clips");
  }
  if (eligible.empty()) {
    throw IneligibleDataset(
        "cannot build eval sets: no track with 2+ clips has 9 clips among co-occurring tracks "
        "(largest negative pool: " +
        std::to_string(best_pool) + ")");
  }

  EvalSets out;
  out.seed = seed;
  out.filter = filter;
  for (std::size_t s = 0; s < n_sets; ++s) {
    bool accepted = false;
    for (std::size_t attempt = 0; attempt < kMaxAttemptsPerSet && !accepted; ++attempt) {
      Rng rng = make_rng(seed, "eval.set", {s, attempt});
      const Candidate& c = eligible[uniform_index(rng, eligible.size())];
      const auto pos = sample_without_replacement(clips.at(c.key), kPositives, rng);
      const auto neg = sample_without_replacement(c.pool, kNegatives, rng);
      if (filter.enabled) {
        const double iou = crop_overlap(manifest.clips[manifest.index_of(pos[0])],
                                        manifest.clips[manifest.index_of(pos[1])]);
        if (iou > filter.max_iou) continue;
      }
      EvalSet set;
      set.track = c.key;
      std::copy(pos.begin(), pos.end(), set.positives.begin());
      std::copy(neg.begin(), neg.end(), set.negatives.begin());
      out.sets.push_back(set);
      accepted = true;
    }
    if (!accepted) {
      throw IneligibleDataset("cannot build eval set " + std::to_string(s) +
                              ": the overlap filter rejected " +
                              std::to_string(kMaxAttemptsPerSet) + " draws in a row");
    }
  }
  return out;
}

void validate_eval_set(const ingest::ClipManifest& manifest, const EvalSet& set) {
  std::set<long> seen;
  for (long id : set.positives) {
    if (manifest.clips[manifest.index_of(id)].track_key() != set.track) {
      throw ValidationError("eval set positive " + std::to_string(id) + " is not from track " +
                            ingest::to_string(set.track));
    }
    seen.insert(id);
  }
  for (long id : set.negatives) {
    const auto key = manifest.clips[manifest.index_of(id)].track_key();
    if (key == set.track || !manifest.graph.adjacent(key, set.track)) {
      throw ValidationError("eval set negative " + std::to_string(id) +
                            " is not from a track co-occurring with " +
                            ingest::to_string(set.track));
    }
    seen.insert(id);
  }
  if (seen.size() != kPositives + kNegatives) throw ValidationError("eval set repeats a clip");
}

std::vector<std::size_t> rank_gallery(std::span<const double> query, const Matrix& gallery) {
  if (gallery.rows() == 0) throw ValidationError("rank_gallery: empty gallery");
  if (gallery.cols() != query.size()) {
    throw ValidationError("rank_gallery: query width " + std::to_string(query.size()) +
                          " differs from gallery width " + std::to_string(gallery.cols()));
  }
  std::vector<double> dist(gallery.rows());
  for (std::size_t i = 0; i < gallery.rows(); ++i) {
    dist[i] = kernels::euclidean(query, gallery.row(i));
    if (!std::isfinite(dist[i])) throw ValidationError("rank_gallery: non-finite distance");
  }
  std::vector<std::size_t> order(gallery.rows());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  return order;
}

Interval wilson_interval(std::size_t hits, std::size_t n) {
  if (n == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double denom = 1.0 + z * z / nn;
  const double centre = (p + z * z / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::vector<long> referenced_clips(const EvalSets& sets) {
  std::set<long> ids;
  for (const auto& s : sets.sets) {
    ids.insert(s.positives.begin(), s.positives.end());
    ids.insert(s.negatives.begin(), s.negatives.end());
  }
  return {ids.begin(), ids.end()};
}

std::size_t positive_slot(std::uint64_t seed, std::size_t set_id, std::size_t q) {
  Rng rng = make_rng(seed, "eval.slot", {set_id, q});
  return uniform_index(rng, kGallerySize);
}

EvalReport evaluate(const EvalSets& sets, const EmbeddingTable& embeddings) {
  EvalReport report;
  report.n_sets = sets.sets.size();
  report.seed = sets.seed;
  report.filter = sets.filter;
  std::size_t dim = 0;
  auto lookup = [&](long id) -> const std::vector<double>& {
    auto it = embeddings.find(id);
    if (it == embeddings.end()) {
      throw ValidationError("evaluate: no embedding for clip " + std::to_string(id));
    }
    if (dim == 0) dim = it->second.size();
    if (it->second.empty() || it->second.size() != dim) {
      throw ValidationError("evaluate: embedding of clip " + std::to_string(id) + " has width " +
                            std::to_string(it->second.size()) + ", expected " +
                            std::to_string(dim));
    }
    for (double v : it->second) {
      if (!std::isfinite(v)) {
        throw ValidationError("evaluate: non-finite embedding for clip " + std::to_string(id));
      }
    }
    return it->second;
  };

  for (std::size_t s = 0; s < sets.sets.size(); ++s) {
    const EvalSet& set = sets.sets[s];
    for (std::size_t q = 0; q < kPositives; ++q) {
      const std::vector<double>& query = lookup(set.positives[q]);
      const std::size_t slot = positive_slot(sets.seed, s, q);
      Matrix gallery(kGallerySize, dim);
      std::size_t next_negative = 0;
      for (std::size_t g = 0; g < kGallerySize; ++g) {
        const long id = g == slot ? set.positives[1 - q] : set.negatives[next_negative++];
        const std::vector<double>& e = lookup(id);
        std::copy(e.begin(), e.end(), gallery.row(g).begin());
      }
      const auto order = rank_gallery(query, gallery);
      const std::size_t rank =
          static_cast<std::size_t>(std::find(order.begin(), order.end(), slot) - order.begin()) + 1;
      for (std::size_t k = rank; k <= kGallerySize; ++k) ++report.hits_at[k - 1];
      report.ranks.push_back({s, set.positives[q], rank});
    }
  }
  report.n_queries = report.ranks.size();
  if (report.n_queries > 0) {
    const double n = static_cast<double>(report.n_queries);
    report.top1 = static_cast<double>(report.hits_at[0]) / n;
    report.top3 = static_cast<double>(report.hits_at[2]) / n;
  }
  report.top1_ci = wilson_interval(report.hits_at[0], report.n_queries);
  report.top3_ci = wilson_interval(report.hits_at[2], report.n_queries);
  return report;
}

EvalReport evaluate(const EvalSets& sets,
                    const std::function<std::vector<double>(long)>& embedder) {
  EmbeddingTable table;
  for (long id : referenced_clips(sets)) {
    try {
      table[id] = embedder(id);
    } catch (const std::exception& e) {
      throw ValidationError("evaluate: embedding clip " + std::to_string(id) +
                            " failed: " + e.what());
    }
  }
  return evaluate(sets, table);
}

namespace {

Json filter_json(const SetFilter& f) {
  return Json{{"enabled", f.enabled}, {"max_iou", f.max_iou}};
}

}  // namespace

std::string eval_sets_to_json(const EvalSets& sets) {
  Json j;
  j["seed"] = sets.seed;
  j["filter"] = filter_json(sets.filter);
  j["negatives_policy"] = "pooled over co-occurring tracks, without replacement over clips";
  Json arr = Json::array();
  for (const EvalSet& s : sets.sets) {
    arr.push_back(Json{{"track", {s.track.video_id, s.track.track_id}},
                       {"positives", s.positives},
                       {"negatives", s.negatives}});
  }
  j["sets"] = std::move(arr);
  return j.dump(1) + "\n";
}

EvalSets eval_sets_from_json(const std::string& text, const std::string& source_name) {
  EvalSets out;
  try {
    const Json j = Json::parse(text);
    out.seed = j.at("seed").get<std::uint64_t>();
    out.filter.enabled = j.at("filter").at("enabled").get<bool>();
    out.filter.max_iou = j.at("filter").at("max_iou").get<double>();
    for (const Json& s : j.at("sets")) {
      EvalSet set;
      set.track = {s.at("track").at(0).get<int>(), s.at("track").at(1).get<int>()};
      const auto pos = s.at("positives").get<std::vector<long>>();
      const auto neg = s.at("negatives").get<std::vector<long>>();
      if (pos.size() != kPositives || neg.size() != kNegatives) {
        throw FormatError(source_name + ": eval set " + std::to_string(out.sets.size()) +
                          " needs exactly 2 positives and 9 negatives");
      }
      std::copy(pos.begin(), pos.end(), set.positives.begin());
      std::copy(neg.begin(), neg.end(), set.negatives.begin());
      out.sets.push_back(set);
    }
  } catch (const Json::exception& e) {
    throw FormatError(source_name + ": malformed eval sets: " + e.what());
  }
  return out;
}

void save_eval_sets(const std::filesystem::path& path, const EvalSets& sets) {
  write_file(path, eval_sets_to_json(sets));
}

EvalSets load_eval_sets(const std::filesystem::path& path) {
  return eval_sets_from_json(read_file(path), path.string());
}

std::string report_to_json(const EvalReport& r) {
  Json j;
  j["n_sets"] = r.n_sets;
  j["n_queries"] = r.n_queries;
  j["top1"] = r.top1;
  j["top3"] = r.top3;
  j["top1_ci95"] = {r.top1_ci.lo, r.top1_ci.hi};
  j["top3_ci95"] = {r.top3_ci.lo, r.top3_ci.hi};
  j["hits_at_k"] = r.hits_at;
  j["seed"] = r.seed;
  j["filter"] = filter_json(r.filter);
  j["negatives_policy"] = "pooled over co-occurring tracks, without replacement over clips";
  Json ranks = Json::array();
  for (const QueryRank& q : r.ranks) ranks.push_back({q.set_id, q.query_clip, q.positive_rank});
  j["ranks"] = std::move(ranks);
  return j.dump(1) + "\n";
}

void write_rank_table(std::ostream& out, const EvalReport& report) {
  out << "set_id,query_clip,positive_rank\n";
  for (const QueryRank& q : report.ranks) {
    out << q.set_id << ',' << q.query_clip << ',' << q.positive_rank << '\n';
  }
}

}  // namespace rovf::eval
