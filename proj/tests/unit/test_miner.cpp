// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rovf/core/error.hpp"
#include "rovf/core/kernels.hpp"
#include "rovf/miner/miner.hpp"

namespace rovf::miner {
namespace {

Matrix column(std::initializer_list<double> v) { return Matrix(v.size(), 1, std::vector<double>(v)); }

TEST(MineHardTriplet, OneDimensionalExample) {
  const TripletIndex t = mine_hard_triplet(column({0.0, 1.0, 0.3}), column({0.9, 5.0}));
  EXPECT_EQ(t, (TripletIndex{1, 0, 0}));
}

TEST(MineHardTriplet, TiesGoToLowestIndex) {
  EXPECT_EQ(mine_hard_triplet(column({2.0, 2.0}), column({7.0})), (TripletIndex{0, 1, 0}));
  EXPECT_EQ(mine_hard_triplet(column({1, 1, 1}), column({1, 1})), (TripletIndex{0, 1, 0}));
  // Hardest pair (1, 2); both negatives sit at distance 1 from it.
  EXPECT_EQ(mine_hard_triplet(column({0, 2, -2}), column({1, -1})), (TripletIndex{1, 2, 0}));
  // Equidistant negative: anchor stays the lower index of the pair.
  EXPECT_EQ(mine_hard_triplet(column({-1, 1}), column({0})), (TripletIndex{0, 1, 0}));
}

TEST(MineHardTriplet, Errors) {
  EXPECT_THROW(mine_hard_triplet(column({1}), column({2})), ValidationError);
  EXPECT_THROW(mine_hard_triplet(column({1, 2}), Matrix(0, 1)), ValidationError);
  EXPECT_THROW(mine_hard_triplet(column({1, 2}), Matrix(1, 2)), ValidationError);
  EXPECT_THROW(mine_hard_triplet(column({1, NAN}), column({2})), ValidationError);
}

Matrix random_embeddings(Rng& rng, std::size_t rows, std::size_t dim, bool quantized) {
  Matrix m = testing::random_matrix(rows, dim, rng);
  // Coarse grids make exact distance ties common.
  if (quantized)
    for (double& v : m.values()) v = std::round(v * 2.0);
  return m;
}

TEST(MineHardTriplet, MatchesBruteForceOracle) {
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t np = 2 + uniform_index(rng, 19), nn = 1 + uniform_index(rng, 20);
    const std::size_t dim = 1 + uniform_index(rng, 16);
    const bool q = trial % 3 == 0;
    const Matrix p = random_embeddings(rng, np, dim, q), n = random_embeddings(rng, nn, dim, q);
    ASSERT_EQ(mine_hard_triplet(p, n), testing::brute_force_mine(p, n)) << "trial " << trial;
  }
}

TEST(MineHardTriplet, InvariantToPositiveScaling) {
  Rng rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix p = testing::random_matrix(2 + uniform_index(rng, 10), 4, rng);
    Matrix n = testing::random_matrix(1 + uniform_index(rng, 10), 4, rng);
    const TripletIndex want = mine_hard_triplet(p, n);
    const double s = trial % 2 ? 4.0 : 0.25;  // powers of two keep distances exact
    for (double& v : p.values()) v *= s;
    for (double& v : n.values()) v *= s;
    EXPECT_EQ(mine_hard_triplet(p, n), want);
  }
}

ingest::ClipManifest two_track_manifest() {
  // 24 s tracks give 5 clips each.
  std::vector<ingest::Track> tracks{testing::steady_track(0, 1, 0, 24, 100, 90),
                                    testing::steady_track(0, 2, 0, 24, 100, 90)};
  return ingest::make_manifest(tracks, ingest::IngestConfig{});
}

TEST(CandidateSampler, CapsByAvailability) {
  const auto m = two_track_manifest();
  ASSERT_EQ(m.clips.size(), 10u);
  const CandidateSampler sampler(m);
  Rng rng(1);
  const CandidateSet set = sampler.sample(20, 20, rng);
  EXPECT_EQ(set.positives.size(), 5u);
  EXPECT_EQ(set.negatives.size(), 5u);
  std::set<long> all(set.positives.begin(), set.positives.end());
  all.insert(set.negatives.begin(), set.negatives.end());
  EXPECT_EQ(all.size(), 10u);
  for (long c : set.positives) EXPECT_EQ(m.clips[m.index_of(c)].track_key(), set.anchor_track);
  for (long c : set.negatives)
    EXPECT_TRUE(m.graph.adjacent(m.clips[m.index_of(c)].track_key(), set.anchor_track));
}

TEST(CandidateSampler, DeterministicAndLimited) {
  const auto m = two_track_manifest();
  const CandidateSampler sampler(m);
  Rng a(5), b(5);
  EXPECT_EQ(sampler.sample(3, 2, a), sampler.sample(3, 2, b));
  Rng c(6);
  const CandidateSet s = sampler.sample(3, 2, c);
  EXPECT_EQ(s.positives.size(), 3u);
  EXPECT_EQ(s.negatives.size(), 2u);
}

TEST(CandidateSampler, IneligibleDatasets) {
  const std::vector<ingest::Track> single{testing::steady_track(0, 1, 0, 40, 100, 90)};
  const auto one = ingest::make_manifest(single, ingest::IngestConfig{});
  EXPECT_THROW(CandidateSampler{one}, IneligibleDataset);
  Rng rng(1);
  EXPECT_THROW(sample_candidates(one, 20, 20, rng), IneligibleDataset);
  // Co-occurring tracks with only 2 clips each cannot anchor.
  const std::vector<ingest::Track> shorts{testing::steady_track(0, 1, 0, 14, 100, 90),
                                          testing::steady_track(0, 2, 0, 14, 100, 90)};
  EXPECT_THROW(CandidateSampler{ingest::make_manifest(shorts, ingest::IngestConfig{})},
               IneligibleDataset);
}

TEST(ValidateTriplet, ChecksTracksAndCoOccurrence) {
  std::vector<ingest::Track> tracks{testing::steady_track(0, 1, 0, 24, 100, 90),
                                    testing::steady_track(0, 2, 0, 24, 100, 90),
                                    testing::steady_track(0, 3, 100, 24, 100, 90)};
  const auto m = ingest::make_manifest(tracks, ingest::IngestConfig{});
  EXPECT_NO_THROW(validate_triplet(m, {0, 1, 5}));
  EXPECT_THROW(validate_triplet(m, {0, 0, 5}), ValidationError);
  EXPECT_THROW(validate_triplet(m, {0, 5, 6}), ValidationError);   // positive off-track
  EXPECT_THROW(validate_triplet(m, {0, 1, 2}), ValidationError);   // negative same track
  EXPECT_THROW(validate_triplet(m, {0, 1, 10}), ValidationError);  // no co-occurrence
}

class BatchTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::vector<ingest::Track> tracks;
    for (int id = 0; id < 4; ++id) tracks.push_back(testing::steady_track(0, id, 0, 30, 100, 90));
    manifest_ = ingest::make_manifest(tracks, ingest::IngestConfig{});
    Rng rng(3);
    store_ = encoders::EmbeddingStore(4);
    std::normal_distribution<float> n;
    for (const auto& clip : manifest_.clips) {
      encoders::ClipEmbedding e{2, 3, std::vector<float>(24)};
      for (float& v : e.values) v = n(rng);
      store_.insert(static_cast<std::uint64_t>(clip.clip_id), e);
    }
    model::RoVFConfig cfg;
    cfg.d_model = 4;
    cfg.n_latents = 2;
    cfg.n_layers = 1;
    cfg.n_heads = 2;
    cfg.out_dim = 3;
    model_ = model::RoVFModel(cfg, 4);
  }

  ingest::ClipManifest manifest_;
  encoders::EmbeddingStore store_;
  model::RoVFModel model_;
};

TEST_F(BatchTest, TenTripletsThirtySlotsAllValid) {
  const CandidateSampler sampler(manifest_);
  const encoders::PrecomputedClipEncoder enc(store_);
  Rng rng(7);
  const TripletBatch b = build_batch(sampler, model_, enc, 10, BatchOptions{}, rng);
  ASSERT_EQ(b.triplets.size(), 10u);
  for (const MinedTriplet& t : b.triplets) {
    EXPECT_NO_THROW(validate_triplet(manifest_, t.triplet));
    EXPECT_GE(t.d_ap, 0.0);
  }
  Rng one(8);
  EXPECT_EQ(build_batch(sampler, model_, enc, 1, BatchOptions{}, one).triplets.size(), 1u);
}

TEST_F(BatchTest, DeterministicAndLogged) {
  const CandidateSampler sampler(manifest_);
  const encoders::PrecomputedClipEncoder enc(store_);
  Rng a(9), b(9);
  const TripletBatch x = build_batch(sampler, model_, enc, 4, BatchOptions{}, a);
  const TripletBatch y = build_batch(sampler, model_, enc, 4, BatchOptions{}, b);
  ASSERT_EQ(x.triplets.size(), y.triplets.size());
  for (std::size_t i = 0; i < x.triplets.size(); ++i) {
    EXPECT_EQ(x.triplets[i].triplet, y.triplets[i].triplet);
    EXPECT_EQ(x.triplets[i].d_an, y.triplets[i].d_an);
  }
  std::ostringstream out;
  TripletLog log(out);
  log.write(1, 0, x);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "epoch,batch,anchor_clip,positive_clip,negative_clip,d_ap,d_an");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
}

TEST_F(BatchTest, MinedDistancesMatchEvalEmbeddings) {
  const CandidateSampler sampler(manifest_);
  const encoders::PrecomputedClipEncoder enc(store_);
  Rng rng(10);
  const TripletBatch b = build_batch(sampler, model_, enc, 3, BatchOptions{}, rng);
  for (const MinedTriplet& t : b.triplets) {
    auto embed = [&](long id) {
      return model::rovf_forward(model_, enc.encode(id), model::Mode::kEval, nullptr);
    };
    EXPECT_NEAR(t.d_ap, kernels::euclidean(embed(t.triplet.anchor), embed(t.triplet.positive)), 1e-12);
    EXPECT_NEAR(t.d_an, kernels::euclidean(embed(t.triplet.anchor), embed(t.triplet.negative)), 1e-12);
  }
}

}  // namespace
}  // namespace rovf::miner
