// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/miner/miner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rovf/core/error.hpp"
#include "rovf/core/kernels.hpp"
#include "rovf/model/embed.hpp"

namespace rovf::miner {

CandidateSampler::CandidateSampler(const ingest::ClipManifest& manifest,
                                   std::size_t min_anchor_clips)
    : manifest_(manifest) {
  for (const ingest::ClipSpec& c : manifest.clips) clips_[c.track_key()].push_back(c.clip_id);
  for (const auto& [key, own] : clips_) {
    std::vector<long> pool;
    for (const TrackKey& other : manifest.graph.neighbors(key)) {
      if (auto it = clips_.find(other); it != clips_.end()) {
        pool.insert(pool.end(), it->second.begin(), it->second.end());
      }
    }
    if (own.size() >= min_anchor_clips && !pool.empty()) anchors_.push_back(key);
    negative_pool_[key] = std::move(pool);
  }
  if (anchors_.empty()) {
    throw IneligibleDataset("ineligible dataset: no track has " +
                            std::to_string(min_anchor_clips) +
                            " or more clips together with a co-occurring track that has clips");
  }
}

CandidateSet CandidateSampler::sample(std::size_t j, std::size_t k, Rng& rng) const {
  const TrackKey anchor = anchors_[uniform_index(rng, anchors_.size())];
  return sample_for(anchor, j, k, rng);
}

CandidateSet CandidateSampler::sample_for(const TrackKey& anchor, std::size_t j, std::size_t k,
                                          Rng& rng) const {
  if (j < 2 || k < 1) throw ValidationError("candidate sampling needs j >= 2 and k >= 1");
  if (!std::binary_search(anchors_.begin(), anchors_.end(), anchor)) {
    throw ValidationError("track " + ingest::to_string(anchor) + " is not an eligible anchor");
  }
  CandidateSet set;
  set.anchor_track = anchor;
  set.positives = sample_without_replacement(clips_.at(anchor), j, rng);
  set.negatives = sample_without_replacement(negative_pool_.at(anchor), k, rng);
  return set;
}

CandidateSet sample_candidates(const ingest::ClipManifest& manifest, std::size_t j, std::size_t k,
                               Rng& rng) {
  return CandidateSampler(manifest).sample(j, k, rng);
}

TripletIndex mine_hard_triplet(const Matrix& pos, const Matrix& neg) {
  if (pos.rows() < 2) throw ValidationError("mine_hard_triplet: need at least 2 positives");
  if (neg.rows() < 1) throw ValidationError("mine_hard_triplet: need at least 1 negative");
  if (pos.cols() != neg.cols()) {
    throw ValidationError("mine_hard_triplet: positive and negative widths differ");
  }
  for (const Matrix* m : {&pos, &neg}) {
    for (double v : m->values()) {
      if (!std::isfinite(v)) throw ValidationError("mine_hard_triplet: non-finite embedding");
    }
  }
  // Strict comparisons keep the first (lowest-index) winner.
  std::size_t p1 = 0, p2 = 1;
  double widest = -1.0;
  for (std::size_t a = 0; a < pos.rows(); ++a) {
    for (std::size_t b = a + 1; b < pos.rows(); ++b) {
      const double d = kernels::euclidean(pos.row(a), pos.row(b));
      if (d > widest) {
        widest = d;
        p1 = a;
        p2 = b;
      }
    }
  }
  std::size_t best = 0;
  double nearest = 0.0;
  for (std::size_t n = 0; n < neg.rows(); ++n) {
    const double d = std::min(kernels::euclidean(pos.row(p1), neg.row(n)),
                              kernels::euclidean(pos.row(p2), neg.row(n)));
    if (n == 0 || d < nearest) {
      nearest = d;
      best = n;
    }
  }
  const double d1 = kernels::euclidean(pos.row(p1), neg.row(best));
  const double d2 = kernels::euclidean(pos.row(p2), neg.row(best));
  // On equal distance the lower index (p1) is the anchor.
  if (d2 < d1) return {p2, p1, best};
  return {p1, p2, best};
}

void validate_triplet(const ingest::ClipManifest& manifest, const Triplet& t) {
  const auto& a = manifest.clips.at(manifest.index_of(t.anchor));
  const auto& p = manifest.clips.at(manifest.index_of(t.positive));
  const auto& n = manifest.clips.at(manifest.index_of(t.negative));
  if (t.anchor == t.positive || t.anchor == t.negative || t.positive == t.negative) {
    throw ValidationError("triplet reuses a clip");
  }
  if (a.track_key() != p.track_key()) {
    throw ValidationError("triplet anchor " + std::to_string(t.anchor) + " and positive " +
                          std::to_string(t.positive) + " come from different tracks");
  }
  if (n.track_key() == a.track_key() || !manifest.graph.adjacent(a.track_key(), n.track_key())) {
    throw ValidationError("triplet negative " + std::to_string(t.negative) +
                          " does not come from a track co-occurring with the anchor");
  }
}

TripletBatch build_batch(const CandidateSampler& sampler, const model::RoVFModel& model,
                         const encoders::ClipEncoder& encoder, std::span<const TrackKey> anchors,
                         const BatchOptions& opts, Rng& rng) {
  std::vector<CandidateSet> sets;
  sets.reserve(anchors.size());
  std::vector<long> all;
  for (const TrackKey& anchor : anchors) {
    sets.push_back(sampler.sample_for(anchor, opts.j, opts.k, rng));
    all.insert(all.end(), sets.back().positives.begin(), sets.back().positives.end());
    all.insert(all.end(), sets.back().negatives.begin(), sets.back().negatives.end());
  }
  // One parallel pass over every candidate clip of the batch.
  const Matrix emb = model::embed_clips(model, encoder, all);

  TripletBatch batch;
  std::size_t row = 0;
  for (const CandidateSet& set : sets) {
    Matrix pos(set.positives.size(), emb.cols());
    Matrix neg(set.negatives.size(), emb.cols());
    for (std::size_t i = 0; i < pos.rows(); ++i, ++row) {
      std::copy(emb.row(row).begin(), emb.row(row).end(), pos.row(i).begin());
    }
    for (std::size_t i = 0; i < neg.rows(); ++i, ++row) {
      std::copy(emb.row(row).begin(), emb.row(row).end(), neg.row(i).begin());
    }
    const TripletIndex ix = mine_hard_triplet(pos, neg);
    MinedTriplet m;
    m.triplet = {set.positives[ix.anchor], set.positives[ix.positive], set.negatives[ix.negative]};
    m.anchor_track = set.anchor_track;
    m.d_ap = kernels::euclidean(pos.row(ix.anchor), pos.row(ix.positive));
    m.d_an = kernels::euclidean(pos.row(ix.anchor), neg.row(ix.negative));
    validate_triplet(sampler.manifest(), m.triplet);
    batch.triplets.push_back(m);
  }
  return batch;
}

TripletBatch build_batch(const CandidateSampler& sampler, const model::RoVFModel& model,
                         const encoders::ClipEncoder& encoder, std::size_t batch_triplets,
                         const BatchOptions& opts, Rng& rng) {
  if (batch_triplets == 0) throw ValidationError("batch_triplets must be >= 1");
  std::vector<TrackKey> anchors;
  for (std::size_t i = 0; i < batch_triplets; ++i) {
    anchors.push_back(sampler.anchors()[uniform_index(rng, sampler.anchors().size())]);
  }
  return build_batch(sampler, model, encoder, anchors, opts, rng);
}

TripletLog::TripletLog(std::ostream& out) : out_(out) {
  out_ << "epoch,batch,anchor_clip,positive_clip,negative_clip,d_ap,d_an\n";
}

void TripletLog::write(int epoch, int batch, const TripletBatch& b) {
  const auto old = out_.precision(17);
  for (const MinedTriplet& m : b.triplets) {
    out_ << epoch << ',' << batch << ',' << m.triplet.anchor << ',' << m.triplet.positive << ','
         << m.triplet.negative << ',' << m.d_ap << ',' << m.d_an << '\n';
  }
  out_.precision(old);
}

}  // namespace rovf::miner
