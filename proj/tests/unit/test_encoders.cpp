// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <numeric>

#include "fixtures.hpp"
#include "rovf/core/digest.hpp"
#include "rovf/core/error.hpp"
#include "rovf/encoders/clip_encoder.hpp"
#include "rovf/encoders/embedding_store.hpp"
#include "rovf/encoders/encoder.hpp"

namespace rovf::encoders {
namespace {

EncoderConfig toy(int resize, int patch, int d) {
  EncoderConfig cfg;
  cfg.resize_to = resize;
  cfg.patch_size = patch;
  cfg.d_model = d;
  return cfg;
}

std::vector<float> random_frame(const EncoderConfig& cfg, Rng& rng) {
  std::vector<float> f(static_cast<std::size_t>(cfg.channels) * cfg.resize_to * cfg.resize_to);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (float& v : f) v = u(rng);
  return f;
}

TEST(ToyEncoder, FullSizeFrameGives196Tokens) {
  const EncoderConfig cfg = toy(224, 16, 24);
  const ToyPatchEncoder enc(cfg, 1);
  Rng rng(1);
  const FrameTokens t = enc.encode(random_frame(cfg, rng));
  EXPECT_EQ(t.n_tokens(), 196u);
  EXPECT_EQ(t.d_model(), 24u);
}

TEST(ToyEncoder, ZeroProjectionGivesPositions) {
  const EncoderConfig cfg = toy(16, 4, 6);
  ToyPatchEncoder enc(cfg, 2);
  for (double& v : enc.params()[ToyPatchEncoder::kWeight].value.values()) v = 0.0;
  const std::vector<float> black(3 * 16 * 16, 0.0f);
  EXPECT_EQ(enc.encode(black).tokens, sinusoidal_positions(16, 6));
}

TEST(ToyEncoder, SinusoidalPositionsClosedForm) {
  const Matrix p = sinusoidal_positions(5, 4);
  for (int i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(p(i, 0), std::sin(i));
    EXPECT_DOUBLE_EQ(p(i, 1), std::cos(i));
    EXPECT_DOUBLE_EQ(p(i, 2), std::sin(i / 100.0));
    EXPECT_DOUBLE_EQ(p(i, 3), std::cos(i / 100.0));
  }
}

TEST(ToyEncoder, DeterministicAndGraphMatchesDirect) {
  const EncoderConfig cfg = toy(16, 8, 8);
  const ToyPatchEncoder a(cfg, 3), b(cfg, 3), c(cfg, 4);
  EXPECT_EQ(a.params(), b.params());
  EXPECT_FALSE(a.params() == c.params());
  Rng rng(2);
  const auto frame = random_frame(cfg, rng);
  EXPECT_EQ(a.encode(frame), a.encode(frame));
  Graph g(false);
  EXPECT_EQ(g.value(a.encode(g, frame, nullptr)), a.encode(frame).tokens);
}

TEST(ToyEncoder, EveryPatchInfluencesOutput) {
  const EncoderConfig cfg = toy(16, 4, 8);
  const ToyPatchEncoder enc(cfg, 5);
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto frame = random_frame(cfg, rng);
    const FrameTokens base = enc.encode(frame);
    const int patch = static_cast<int>(uniform_index(rng, 16));
    const int px = (patch % 4) * 4 + static_cast<int>(uniform_index(rng, 4));
    const int py = (patch / 4) * 4 + static_cast<int>(uniform_index(rng, 4));
    const int ch = static_cast<int>(uniform_index(rng, 3));
    float& v = frame[static_cast<std::size_t>((ch * 16 + py) * 16 + px)];
    v = v > 0.5f ? v - 0.4f : v + 0.4f;
    const FrameTokens changed = enc.encode(frame);
    EXPECT_NE(changed.tokens, base.tokens);
    // Only the perturbed patch's token moves.
    for (int t = 0; t < 16; ++t) {
      const auto a = base.tokens.row(static_cast<std::size_t>(t));
      const auto b = changed.tokens.row(static_cast<std::size_t>(t));
      EXPECT_EQ(std::equal(a.begin(), a.end(), b.begin()), t != patch);
    }
  }
}

TEST(ToyEncoder, RejectsBadConfigAndFrames) {
  EXPECT_THROW(toy(30, 16, 8).validate(), ValidationError);
  const ToyPatchEncoder enc(toy(16, 8, 8), 1);
  EXPECT_THROW(enc.encode(std::vector<float>(10)), ValidationError);
  EXPECT_THROW(encoder_kind_from_string("resnet"), ValidationError);
  EXPECT_EQ(encoder_kind_from_string(to_string(EncoderKind::kPrecomputed)), EncoderKind::kPrecomputed);
}

FrameTokens tokens(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<double> v;
  std::size_t cols = 0;
  for (const auto& r : rows) {
    cols = r.size();
    v.insert(v.end(), r.begin(), r.end());
  }
  return {Matrix(rows.size(), cols, v)};
}

TEST(AverageBaseline, Examples) {
  const std::vector<FrameTokens> one{tokens({{1.5, -2.0}})};
  EXPECT_EQ(average_baseline(one), (std::vector<double>{1.5, -2.0}));
  const std::vector<FrameTokens> two{tokens({{1, 2}, {3, 4}}), tokens({{5, 6}})};
  EXPECT_EQ(average_baseline(two), (std::vector<double>{3.5, 4.5}));
  EXPECT_THROW(average_baseline(std::vector<FrameTokens>{}), ValidationError);
  EXPECT_THROW(average_baseline(std::vector<FrameTokens>{tokens({{1, 2}}), tokens({{1}})}),
               ValidationError);
}

TEST(AverageBaseline, ExactlyInvariantToTokenAndFrameOrder) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<FrameTokens> frames;
    const std::size_t nf = 1 + uniform_index(rng, 6);
    for (std::size_t f = 0; f < nf; ++f)
      frames.push_back({testing::random_matrix(1 + uniform_index(rng, 9), 5, rng, 1e3)});
    const auto want = average_baseline(frames);
    std::shuffle(frames.begin(), frames.end(), rng);
    for (FrameTokens& f : frames) {
      std::vector<std::size_t> perm(f.n_tokens());
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      Matrix m(f.n_tokens(), f.d_model());
      for (std::size_t r = 0; r < perm.size(); ++r)
        std::copy(f.tokens.row(perm[r]).begin(), f.tokens.row(perm[r]).end(), m.row(r).begin());
      f.tokens = m;
    }
    EXPECT_EQ(average_baseline(frames), want);
  }
}

EmbeddingStore random_store(Rng& rng, std::uint32_t d) {
  EmbeddingStore store(d);
  std::normal_distribution<float> n;
  for (std::uint64_t id : {9u, 2u, 40u}) {
    ClipEmbedding c;
    c.n_frames = 1 + static_cast<std::uint32_t>(uniform_index(rng, 3));
    c.n_tokens = 1 + static_cast<std::uint32_t>(uniform_index(rng, 4));
    c.values.resize(std::size_t{c.n_frames} * c.n_tokens * d);
    for (float& v : c.values) v = n(rng);
    store.insert(id, c);
  }
  return store;
}

TEST(EmbeddingStore, RoundTripIsBitExact) {
  Rng rng(7);
  const EmbeddingStore store = random_store(rng, 5);
  const std::string bytes = serialize_embeddings(store);
  const EmbeddingStore back = deserialize_embeddings(bytes, "e.bin");
  EXPECT_EQ(back, store);
  EXPECT_EQ(serialize_embeddings(back), bytes);
  std::vector<std::uint64_t> ids;
  for (const auto& [id, c] : back.clips()) ids.push_back(id);
  EXPECT_EQ(ids, (std::vector<std::uint64_t>{2, 9, 40}));
  testing::TempDir dir("rvfe");
  save_embeddings(dir / "e.bin", store);
  EXPECT_EQ(import_embeddings(dir / "e.bin"), store);
}

TEST(EmbeddingStore, HeaderLayout) {
  EmbeddingStore store(2);
  store.insert_video(7, {1.0, -2.0});
  const std::string b = serialize_embeddings(store);
  ASSERT_EQ(b.size(), 4u + 2 + 4 + 4 + 8 + 4 + 4 + 8);
  EXPECT_EQ(b.substr(0, 4), "RVFE");
  EXPECT_EQ(b[4], 1);
  EXPECT_EQ(b[5], 0);
  EXPECT_EQ(b[6], 2);
  EXPECT_EQ(b[14], 7);
  float first = 0;
  std::memcpy(&first, b.data() + 30, 4);
  EXPECT_EQ(first, 1.0f);
  EXPECT_TRUE(store.is_video_level());
  EXPECT_EQ(store.video_embedding(7), (std::vector<double>{1.0, -2.0}));
}

TEST(EmbeddingStore, RejectsCorruptFiles) {
  Rng rng(8);
  EmbeddingStore store(3);
  ClipEmbedding c{10, 1, std::vector<float>(30, 0.5f)};
  store.insert(1, c);
  const std::string good = serialize_embeddings(store);
  // Header claims 10 frames; drop the last frame's payload.
  EXPECT_THROW(deserialize_embeddings(good.substr(0, good.size() - 12), "t"), FormatError);
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_embeddings(bad_magic, "t"), FormatError);
  std::string bad_version = good;
  bad_version[4] = 2;
  EXPECT_THROW(deserialize_embeddings(bad_version, "t"), FormatError);
  EXPECT_THROW(deserialize_embeddings(good + "x", "t"), FormatError);
  EXPECT_THROW(store.insert(1, c), ValidationError);
  EXPECT_THROW(store.insert(2, ClipEmbedding{1, 1, {1.0f}}), ValidationError);
}

TEST(PrecomputedEncoder, ServesTokensVerbatimAndNamesMisses) {
  Rng rng(9);
  const EmbeddingStore store = random_store(rng, 4);
  PrecomputedClipEncoder enc(store);
  const auto frames = enc.encode(9);
  const ClipEmbedding& c = store.at(9);
  ASSERT_EQ(frames.size(), c.n_frames);
  EXPECT_EQ(frames[0].tokens(0, 1), static_cast<double>(c.values[1]));
  EXPECT_EQ(enc.parameters(), nullptr);
  try {
    enc.encode(1234);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("1234"), std::string::npos);
  }
}

}  // namespace
}  // namespace rovf::encoders
