// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "rovf/cli/cli.hpp"
#include "rovf/cli/pipeline.hpp"
#include "rovf/core/digest.hpp"
#include "rovf/encoders/clip_encoder.hpp"
#include "rovf/eval/eval.hpp"
#include "rovf/ingest/frames.hpp"
#include "rovf/ingest/manifest.hpp"
#include "rovf/ingest/pixel_cache.hpp"
#include "rovf/model/checkpoint.hpp"

namespace rovf::cli {
namespace {

using testing::run;
namespace fs = std::filesystem;

constexpr const char* kTinyConfig =
    "n_identities = 4\nduration_s = 90\nresize_to = 16\nkind = toy_patch\npatch_size = 8\n"
    "d_model = 8\nn_latents = 2\nn_layers = 1\nn_heads = 2\nd_ff = 16\nout_dim = 8\n"
    "epochs = 1\nbatch_triplets = 2\ncandidates_j = 6\ncandidates_k = 6\noptimizer = adam\n"
    "checkpoint_epochs = 1\nn_sets = 20\n";

// synth -> ingest -> train in `dir`; returns the config path.
std::string pipeline(const testing::TempDir& dir) {
  const std::string conf = (dir / "tiny.conf").string();
  write_file(conf, kTinyConfig);
  const std::string d = dir.path().string();
  EXPECT_EQ(run({"--seed", "3", "--config", conf, "synth", "--out", d + "/data"}), kExitOk);
  EXPECT_EQ(run({"--seed", "3", "--config", conf, "ingest", "--tracks", d + "/data/tracks.csv",
                 "--frames", d + "/data/frames", "--out", d + "/manifest.json"}),
            kExitOk);
  EXPECT_EQ(run({"--seed", "3", "--config", conf, "train", "--manifest", d + "/manifest.json",
                 "--frames", d + "/data/frames", "--out-dir", d + "/run"}),
            kExitOk);
  return conf;
}

TEST(Cli, UsageErrors) {
  testing::TempDir dir("cli_usage");
  EXPECT_EQ(run({"ingest", "--out", (dir / "m.json").string()}), kExitUsage);
  EXPECT_EQ(run({"ingest", "--tracks", "x.csv", "--out", "m.json", "--bogus"}), kExitUsage);
  EXPECT_EQ(run({"frobnicate"}), kExitUsage);
  EXPECT_EQ(run({"--help"}), kExitOk);
  for (const char* cmd : {"synth", "ingest", "train", "embed", "eval", "report"})
    EXPECT_EQ(run({cmd, "--help"}), kExitOk) << cmd;
  write_file(dir / "bad.conf", "epochz = 3\n");
  EXPECT_EQ(run({"--config", (dir / "bad.conf").string(), "synth", "--out",
                 (dir / "s").string()}),
            kExitUsage);
  EXPECT_EQ(run({"ingest", "--tracks", (dir / "missing.csv").string(), "--out",
                 (dir / "m.json").string()}),
            kExitUsage);
}

TEST(Cli, SmallBoxesGiveZeroClipsWithWarning) {
  testing::TempDir dir("cli_small");
  const std::string d = dir.path().string();
  ASSERT_EQ(run({"synth", "--out", d + "/data", "--identities", "3", "--duration", "40",
                 "--box-scale", "0.5"}),
            kExitOk);
  ::testing::internal::CaptureStderr();
  EXPECT_EQ(run({"ingest", "--tracks", d + "/data/tracks.csv", "--min-box", "70", "--out",
                 d + "/m.json"}),
            kExitOk);
  const std::string err = ::testing::internal::GetCapturedStderr();
  EXPECT_NE(err.find("warning"), std::string::npos) << err;
  EXPECT_TRUE(ingest::load_manifest(d + "/m.json").clips.empty());
}

TEST(Cli, EmptyStatsReportIsUsageError) {
  testing::TempDir dir("cli_report");
  write_file(dir / "stats.csv", "");
  EXPECT_EQ(run({"report", "--stats", (dir / "stats.csv").string(), "--out-dir",
                 (dir / "out").string()}),
            kExitUsage);
}

TEST(Cli, TamperedManifestIsRejected) {
  testing::TempDir dir("cli_tamper");
  write_file(dir / "m.json", "{\"checksum\": \"00\", \"clips\": []}");
  EXPECT_EQ(run({"train", "--manifest", (dir / "m.json").string(), "--frames", "x", "--out-dir",
                 (dir / "run").string()}),
            kExitUsage);
}

TEST(Cli, EmbedThenEvalMatchesInProcessEval) {
  testing::TempDir dir("cli_equiv");
  const std::string conf = pipeline(dir);
  const std::string d = dir.path().string();
  ASSERT_TRUE(fs::exists(d + "/run/final.rvfc"));
  ASSERT_TRUE(fs::exists(d + "/run/stats.csv"));
  ASSERT_TRUE(fs::exists(d + "/run/checkpoint_epoch1.rvfc"));

  ASSERT_EQ(run({"--seed", "3", "--config", conf, "embed", "--manifest", d + "/manifest.json",
                 "--checkpoint", d + "/run/final.rvfc", "--frames", d + "/data/frames", "--out",
                 d + "/emb.rvfe"}),
            kExitOk);
  ASSERT_EQ(run({"--seed", "3", "--config", conf, "eval", "--manifest", d + "/manifest.json",
                 "--embeddings", d + "/emb.rvfe", "--out", d + "/from_file.json", "--sets-out",
                 d + "/sets.json"}),
            kExitOk);
  ASSERT_EQ(run({"--seed", "3", "--config", conf, "eval", "--manifest", d + "/manifest.json",
                 "--sets", d + "/sets.json", "--checkpoint", d + "/run/final.rvfc", "--frames",
                 d + "/data/frames", "--out", d + "/in_process.json"}),
            kExitOk);
  EXPECT_EQ(read_file(d + "/from_file.json"), read_file(d + "/in_process.json"));

  // Same numbers through the library directly.
  const auto manifest = ingest::load_manifest(d + "/manifest.json");
  auto ckpt = model::load_checkpoint(d + "/run/final.rvfc");
  const auto frames = ingest::open_frame_source(d + "/data/frames");
  const auto pixels = ingest::PixelCache::build(manifest, *frames);
  encoders::ToyClipEncoder enc(*ckpt.encoder, pixels);
  const auto sets = eval::load_eval_sets(d + "/sets.json");
  const auto report = eval::evaluate(sets, [&](long clip) {
    return round_to_float(model::rovf_forward(ckpt.model, enc.encode(clip), model::Mode::kEval, nullptr));
  });
  const auto json = nlohmann::json::parse(read_file(d + "/from_file.json"));
  EXPECT_EQ(json["top1"].get<double>(), report.top1);
  EXPECT_EQ(json["top3"].get<double>(), report.top3);
}

TEST(Cli, RandomEmbedderAndReport) {
  testing::TempDir dir("cli_random");
  const std::string conf = pipeline(dir);
  const std::string d = dir.path().string();
  ASSERT_EQ(run({"--seed", "4", "--config", conf, "eval", "--manifest", d + "/manifest.json",
                 "--embedder", "random", "--n-sets", "500", "--out", d + "/random.json"}),
            kExitOk);
  const auto json = nlohmann::json::parse(read_file(d + "/random.json"));
  EXPECT_EQ(json["n_queries"].get<int>(), 1000);
  EXPECT_NEAR(json["top1"].get<double>(), 0.10, 0.03);
  EXPECT_NEAR(json["top3"].get<double>(), 0.30, 0.045);
  EXPECT_TRUE(fs::exists(d + "/random.json.ranks.csv") || fs::exists(d + "/random.ranks.csv"));

  ASSERT_EQ(run({"report", "--stats", d + "/run/stats.csv", "--epochs-csv", d + "/run/epochs.csv",
                 "--eval", d + "/random.json", "--model", "Random", "--epochs", "0", "--out-dir",
                 d + "/report"}),
            kExitOk);
  const std::string metrics = read_file(d + "/report/metrics.csv");
  EXPECT_EQ(metrics.substr(0, metrics.find('\n')), "model,epochs,top1,top3,epoch_time_s");
  EXPECT_NE(metrics.find("Random,0,"), std::string::npos);
  EXPECT_EQ(read_file(d + "/report/loss.svg").substr(0, 4), "<svg");
  EXPECT_TRUE(fs::exists(d + "/report/lr.svg"));
}

TEST(Cli, CommandsAreIdempotent) {
  testing::TempDir a("cli_idem_a"), b("cli_idem_b");
  pipeline(a);
  pipeline(b);
  for (const char* f : {"manifest.json", "run/final.rvfc", "run/stats.csv", "run/triplets.csv",
                        "data/tracks.csv"})
    EXPECT_EQ(sha256_hex(read_file(a / f)), sha256_hex(read_file(b / f))) << f;
  const auto rm = nlohmann::json::parse(read_file(a / "run/run_train.json"));
  EXPECT_EQ(rm["command"].get<std::string>(), "train");
  EXPECT_TRUE(rm.contains("outputs"));
}

}  // namespace
}  // namespace rovf::cli
