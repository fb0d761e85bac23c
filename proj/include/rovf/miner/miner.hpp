// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <span>
#include <vector>

#include "rovf/core/matrix.hpp"
#include "rovf/core/random.hpp"
#include "rovf/encoders/clip_encoder.hpp"
#include "rovf/ingest/manifest.hpp"
#include "rovf/model/rovf.hpp"

namespace rovf::miner {

using ingest::TrackKey;

inline constexpr std::size_t kDefaultCandidates = 20;

struct CandidateSet {
  TrackKey anchor_track;
  std::vector<long> positives;  // clips of anchor_track
  std::vector<long> negatives;  // clips of tracks co-occurring with anchor_track

  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;
};

struct Triplet {
  long anchor = 0;
  long positive = 0;
  long negative = 0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Positions of a mined triplet inside (P, N).
struct TripletIndex {
  std::size_t anchor = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;

  friend bool operator==(const TripletIndex&, const TripletIndex&) = default;
};

/// Candidate sampling over one manifest. Anchors are tracks with at least
/// kMinAnchorClips clips and at least one clip among co-occurring tracks;
/// construction throws IneligibleDataset when there are none.
class CandidateSampler {
 public:
  explicit CandidateSampler(const ingest::ClipManifest& manifest,
                            std::size_t min_anchor_clips = ingest::kMinAnchorClips);

  const std::vector<TrackKey>& anchors() const noexcept { return anchors_; }

  /// Anchor drawn uniformly from anchors().
  CandidateSet sample(std::size_t j, std::size_t k, Rng& rng) const;
  /// Candidates for a given anchor track (must be in anchors()).
  CandidateSet sample_for(const TrackKey& anchor, std::size_t j, std::size_t k, Rng& rng) const;

  const ingest::ClipManifest& manifest() const noexcept { return manifest_; }

 private:
  const ingest::ClipManifest& manifest_;
  std::map<TrackKey, std::vector<long>> clips_;
  std::map<TrackKey, std::vector<long>> negative_pool_;
  std::vector<TrackKey> anchors_;
};

CandidateSet sample_candidates(const ingest::ClipManifest& manifest, std::size_t j, std::size_t k,
                               Rng& rng);

/// Hardest pair among the positives (rows of `pos`), the negative nearest to
/// either of them, and the closer of the pair as anchor. Lowest index wins
/// every tie. Throws ValidationError for |P| < 2, |N| = 0, width mismatch or
/// non-finite values.
TripletIndex mine_hard_triplet(const Matrix& pos, const Matrix& neg);

/// Throws ValidationError unless anchor/positive share a track, the negative
/// comes from a different track that co-occurs with it, and all three differ.
void validate_triplet(const ingest::ClipManifest& manifest, const Triplet& t);

struct MinedTriplet {
  Triplet triplet;
  TrackKey anchor_track;
  double d_ap = 0.0;  // eval-mode distances at mining time
  double d_an = 0.0;
};

struct TripletBatch {
  std::vector<MinedTriplet> triplets;
};

struct BatchOptions {
  std::size_t j = kDefaultCandidates;
  std::size_t k = kDefaultCandidates;
};

/// Mines one triplet per anchor track in `anchors`, in order. Candidate clips
/// are embedded in eval mode (no dropout).
TripletBatch build_batch(const CandidateSampler& sampler, const model::RoVFModel& model,
                         const encoders::ClipEncoder& encoder, std::span<const TrackKey> anchors,
                         const BatchOptions& opts, Rng& rng);

/// `batch_triplets` anchors drawn uniformly (with replacement) from the sampler.
TripletBatch build_batch(const CandidateSampler& sampler, const model::RoVFModel& model,
                         const encoders::ClipEncoder& encoder, std::size_t batch_triplets,
                         const BatchOptions& opts, Rng& rng);

/// `epoch,batch,anchor_clip,positive_clip,negative_clip,d_ap,d_an`
class TripletLog {
 public:
  explicit TripletLog(std::ostream& out);
  void write(int epoch, int batch, const TripletBatch& b);

 private:
  std::ostream& out_;
};

}  // namespace rovf::miner
