// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run. Each criterion prints one PASS/FAIL line; the exit status
// is non-zero if any failed. Usage: rovf_acceptance [desk.conf]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "rovf/cli/pipeline.hpp"
#include "rovf/core/digest.hpp"
#include "rovf/core/keyvalue.hpp"
#include "rovf/eval/eval.hpp"
#include "rovf/ingest/clips.hpp"
#include "rovf/ingest/manifest.hpp"
#include "rovf/ingest/synth.hpp"
#include "rovf/miner/miner.hpp"
#include "rovf/train/schedule.hpp"

#ifndef ROVF_DESK_CONFIG
#define ROVF_DESK_CONFIG "configs/desk.conf"
#endif

namespace {

namespace fs = std::filesystem;
using namespace rovf;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ingest::ClipManifest synthetic_manifest(std::uint64_t seed) {
  const ingest::SynthWorld w = ingest::synth_tracks(10, 300, seed);
  return ingest::make_manifest(w.tracks, ingest::IngestConfig{});
}

// ------------------------------------------------------------ criteria

Outcome random_baseline() {
  const auto t0 = Clock::now();
  const ingest::ClipManifest m = synthetic_manifest(11);
  const eval::EvalSets sets = eval::generate_eval_sets(m, 2500, 12);
  const eval::EvalReport r =
      eval::evaluate(sets, [](long id) { return cli::random_embedding(13, id, 32); });
  const double secs = seconds_since(t0);
  const bool ok = r.n_queries >= 5000 && r.top1 >= 0.08 && r.top1 <= 0.12 && r.top3 >= 0.27 &&
                  r.top3 <= 0.33 && secs < 60;
  return {ok, fmt("%zu queries, top-1 %.2f%% (8-12), top-3 %.2f%% (27-33), %.1f s (< 60)",
                  r.n_queries, 100 * r.top1, 100 * r.top3, secs)};
}

Outcome miner_oracle() {
  const auto t0 = Clock::now();
  Rng rng(21);
  std::size_t agree = 0;
  const std::size_t n = 1000;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t np = 2 + uniform_index(rng, 19), nn = 1 + uniform_index(rng, 20);
    const std::size_t d = 1 + uniform_index(rng, 16);
    Matrix p = testing::random_matrix(np, d, rng), q = testing::random_matrix(nn, d, rng);
    // A third of the instances on a coarse grid, where ties are common.
    if (i % 3 == 0) {
      for (Matrix* x : {&p, &q}) {
        for (double& v : x->values()) v = std::round(v);
      }
    }
    if (miner::mine_hard_triplet(p, q) == testing::brute_force_mine(p, q)) ++agree;
  }
  const double secs = seconds_since(t0);
  return {agree == n && secs < 60,
          fmt("%zu/%zu instances agree, %.2f s (< 60)", agree, n, secs)};
}

Outcome gradient_check() {
  const auto t0 = Clock::now();
  const int n = 24;
  double worst = 0.0, worst_vec = 0.0;
  std::string where;
  std::size_t scalars = 0;
  for (int s = 0; s < n; ++s) {
    const testing::GradCheck g = testing::check_rovf_gradients(1000 + s);
    scalars += g.n_checked;
    worst_vec = std::max(worst_vec, g.rel_err);
    if (g.max_elem_err > worst) {
      worst = g.max_elem_err;
      where = fmt("config %d, %s", s, g.worst.c_str());
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-4 && worst_vec <= 1e-4 && secs < 300,
          fmt("%d configs, %zu scalars, max elementwise rel err %.2e (%s), vector rel err "
              "%.2e, %.1f s (< 300)",
              n, scalars, worst, where.empty() ? "-" : where.c_str(), worst_vec, secs)};
}

Outcome schedule() {
  const train::ScheduleConfig cfg;
  const long spe = 20, total = 100;
  const long w = train::warmup_steps(spe, cfg);
  // W = 1 and total - 1 - W = 98, so step 50 sits at the cosine midpoint.
  const double s0 = train::lr_at(0, spe, total, cfg), sw = train::lr_at(w, spe, total, cfg),
               se = train::lr_at(total - 1, spe, total, cfg);
  const double mid = train::lr_at(w + (total - 1 - w) / 2, spe, total, cfg);
  const double rel = std::abs(mid - 2.55e-4) / 2.55e-4;
  const bool ok = w == 1 && s0 == 1e-4 && sw == 5e-4 && se == 1e-5 && rel <= 1e-12;
  return {ok, fmt("step 0 %.17g, warmup end (step %ld) %.17g, final %.17g, midpoint %.17g "
                  "(rel err %.1e)",
                  s0, w, sw, se, mid, rel)};
}

Outcome clip_generation() {
  Rng rng(31);
  std::size_t tracks = 0, mismatched = 0, filter_violations = 0, clips = 0;
  // Closed form: always-visible large boxes, whole-second durations.
  for (int i = 0; i < 500; ++i) {
    const long secs = static_cast<long>(uniform_index(rng, 400));
    const auto t = testing::steady_track(0, i, 0, secs, 120, 90);
    const auto got = ingest::generate_clips(std::vector<ingest::Track>{t}, ingest::IngestConfig{});
    ++tracks;
    clips += got.size();
    if (static_cast<long>(got.size()) != testing::closed_form_clip_count(secs)) ++mismatched;
  }
  // Gaps, occlusions, boxes around 70 px and mixed source frame rates.
  for (int i = 0; i < 500; ++i) {
    ingest::IngestConfig cfg;
    cfg.source_fps = i % 4 == 0 ? 5 : 1;
    const auto t = testing::random_track(rng, 0, i, cfg.source_fps);
    const auto got = ingest::generate_clips(std::vector<ingest::Track>{t}, cfg);
    const auto want = testing::enumerate_clips(t, cfg);
    ++tracks;
    clips += got.size();
    bool same = got.size() == want.size();
    for (std::size_t c = 0; same && c < got.size(); ++c) {
      same = got[c].frame_indices == want[c].frames && got[c].crop_side == want[c].crop_side;
    }
    if (!same) ++mismatched;
    for (const auto& c : got) {
      bool large = false;
      for (long f : c.frame_indices) large = large || t.find(f)->max_side() > 70.0;
      if (!large) ++filter_violations;
    }
  }
  return {mismatched == 0 && filter_violations == 0,
          fmt("%zu tracks, %zu clips, %zu disagreements with the oracles, %zu clips without a "
              "box above 70 px",
              tracks, clips, mismatched, filter_violations)};
}

Outcome protocol_shape() {
  const ingest::ClipManifest m = synthetic_manifest(41);
  const eval::EvalSets sets = eval::generate_eval_sets(m, 100, 42);
  std::size_t bad_galleries = 0;
  for (const auto& s : sets.sets) {
    for (std::size_t q = 0; q < eval::kPositives; ++q) {
      std::set<long> gallery(s.negatives.begin(), s.negatives.end());
      gallery.insert(s.positives[1 - q]);
      if (gallery.size() != 10 || gallery.count(s.positives[q])) ++bad_galleries;
    }
  }
  const eval::EvalReport r =
      eval::evaluate(sets, [](long id) { return cli::random_embedding(43, id, 16); });
  bool ranks_ok = r.ranks.size() == 200;
  for (const auto& q : r.ranks) ranks_ok = ranks_ok && q.positive_rank >= 1 && q.positive_rank <= 10;
  const bool ok = sets.sets.size() == 100 && r.n_queries == 200 && ranks_ok &&
                  r.hits_at.back() == 200 && bad_galleries == 0;
  return {ok, fmt("%zu sets, %zu queries, %zu malformed galleries, every rank within 1..10: %s",
                  sets.sets.size(), r.n_queries, bad_galleries, ranks_ok ? "yes" : "no")};
}

// ------------------------------------------------------------ pipeline

struct PipelineRun {
  bool ok = false;
  std::string failed_step;
  double seconds = 0.0;
};

// synth -> ingest (train videos / held-out video) -> train -> embed -> eval
// (trained head and random) -> report, all through the command line.
PipelineRun run_pipeline(const fs::path& dir, const std::string& conf, int n_videos) {
  const auto t0 = Clock::now();
  const std::string d = dir.string();
  std::string train_videos;
  for (int v = 0; v + 1 < n_videos; ++v) train_videos += (v ? "," : "") + std::to_string(v);
  const std::string test_video = std::to_string(n_videos - 1);
  const std::vector<std::vector<std::string>> steps = {
      {"--seed", "7", "--config", conf, "synth", "--out", d + "/data"},
      {"--config", conf, "ingest", "--tracks", d + "/data/tracks.csv", "--frames",
       d + "/data/frames", "--videos", train_videos, "--out", d + "/train.json"},
      {"--config", conf, "ingest", "--tracks", d + "/data/tracks.csv", "--frames",
       d + "/data/frames", "--videos", test_video, "--out", d + "/test.json"},
      {"--seed", "7", "--config", conf, "train", "--manifest", d + "/train.json", "--frames",
       d + "/data/frames", "--out-dir", d + "/train"},
      {"embed", "--manifest", d + "/test.json", "--checkpoint", d + "/train/final.rvfc",
       "--frames", d + "/data/frames", "--out", d + "/test.rvfe"},
      {"--seed", "7", "--config", conf, "eval", "--manifest", d + "/test.json", "--embeddings",
       d + "/test.rvfe", "--sets-out", d + "/sets.json", "--out", d + "/eval_rovf.json"},
      {"--seed", "7", "eval", "--manifest", d + "/test.json", "--sets", d + "/sets.json",
       "--embedder", "random", "--out", d + "/eval_random.json"},
      {"report", "--stats", d + "/train/stats.csv", "--eval", d + "/eval_rovf.json", "--model",
       "RoVF", "--eval", d + "/eval_random.json", "--model", "Random", "--out-dir",
       d + "/report"},
  };
  PipelineRun run;
  for (const auto& s : steps) {
    std::fflush(stdout);
    if (testing::run(s) != 0) {
      const std::set<std::string> commands = {"synth", "ingest", "train", "embed", "eval", "report"};
      run.failed_step = *std::find_if(s.begin(), s.end(), [&](const std::string& w) { return commands.count(w); });
      run.seconds = seconds_since(t0);
      return run;
    }
  }
  run.ok = true;
  run.seconds = seconds_since(t0);
  return run;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(read_file(p)); }

std::vector<double> epoch_losses(const fs::path& csv) {
  std::vector<double> out;
  const std::string text = read_file(csv);
  std::size_t pos = text.find('\n') + 1;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::string line = text.substr(pos, end - pos);
    const std::size_t a = line.find(','), b = line.find(',', a + 1);
    if (a != std::string::npos) out.push_back(std::stod(line.substr(a + 1, b - a - 1)));
    pos = end == std::string::npos ? text.size() : end + 1;
  }
  return out;
}

Outcome end_to_end(const PipelineRun& run, const fs::path& dir, int epochs) {
  if (!run.ok) return {false, "pipeline step '" + run.failed_step + "' failed"};
  const auto rovf = read_json(dir / "eval_rovf.json");
  const auto rnd = read_json(dir / "eval_random.json");
  const double top1 = rovf["top1"].get<double>(), top3 = rovf["top3"].get<double>();
  const double random_top1 = rnd["top1"].get<double>();
  const std::vector<double> loss = epoch_losses(dir / "train" / "epochs.csv");
  bool monotone = true;
  std::string losses;
  for (std::size_t e = 0; e < loss.size(); ++e) {
    if (e > 0 && loss[e] > loss[e - 1]) monotone = false;
    losses += fmt("%s%.5f", e ? " " : "", loss[e]);
  }
  const bool accuracy = top1 >= 0.70;
  const bool improvement = top1 >= 5 * 0.10 && top1 >= 5 * random_top1;
  const bool fast = run.seconds < 600;
  const bool ok = accuracy && improvement && monotone && fast &&
                  static_cast<int>(loss.size()) == epochs;
  return {ok, fmt("top-1 %.1f%% (>= 70: %s), top-3 %.1f%%, random top-1 %.1f%% (>= 5x: %s), "
                  "epoch loss [%s] (non-increasing: %s), pipeline %.0f s (< 600: %s)",
                  100 * top1, accuracy ? "yes" : "no", 100 * top3, 100 * random_top1,
                  improvement ? "yes" : "no", losses.c_str(), monotone ? "yes" : "no",
                  run.seconds, fast ? "yes" : "no")};
}

// Wall-clock fields live only in the run records and epochs.csv; everything
// else must match byte for byte.
bool timing_file(const fs::path& rel) {
  const std::string name = rel.filename().string();
  return name == "epochs.csv" || name.starts_with("run_") || name.ends_with(".run.json");
}

Outcome determinism(const PipelineRun& a, const fs::path& da, const PipelineRun& b,
                    const fs::path& db) {
  if (!a.ok || !b.ok) return {false, "a pipeline run failed"};
  std::map<std::string, std::string> ha, hb;
  std::size_t skipped = 0;
  for (auto [dir, hashes] : {std::pair{da, &ha}, std::pair{db, &hb}}) {
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (!e.is_regular_file()) continue;
      const fs::path rel = fs::relative(e.path(), dir);
      if (timing_file(rel)) {
        ++skipped;
        continue;
      }
      (*hashes)[rel.string()] = sha256_hex(read_file(e.path()));
    }
  }
  std::vector<std::string> differ;
  for (const auto& [k, v] : ha) {
    auto it = hb.find(k);
    if (it == hb.end() || it->second != v) differ.push_back(k);
  }
  for (const auto& [k, v] : hb) {
    if (!ha.count(k)) differ.push_back(k);
  }
  const std::set<std::string> required = {"train.json", "test.json", "train/final.rvfc",
                                          "test.rvfe", "eval_rovf.json", "report/metrics.csv"};
  bool present = true;
  for (const auto& r : required) present = present && ha.count(r);
  std::string list;
  for (std::size_t i = 0; i < differ.size() && i < 5; ++i) list += " " + differ[i];
  return {differ.empty() && present,
          fmt("%zu files compared (manifests, checkpoints, embeddings, eval reports, rank "
              "tables, stats, plots), %zu timing records skipped, %zu differ%s",
              ha.size(), skipped / 2, differ.size(), list.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string conf = argc > 1 ? argv[1] : ROVF_DESK_CONFIG;
  std::vector<std::pair<std::string, Outcome>> results;
  auto record = [&](const std::string& name, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    results.emplace_back(name, o);
  };

  record("random_baseline", random_baseline);
  record("miner_oracle", miner_oracle);
  record("gradient_check", gradient_check);
  record("schedule", schedule);
  record("clip_generation", clip_generation);
  record("protocol_shape", protocol_shape);

  int n_videos = 9, epochs = 5;
  try {
    const KeyValues kv = KeyValues::load(conf);
    kv.read("n_videos", n_videos);
    kv.read("epochs", epochs);
  } catch (const std::exception& e) {
    std::printf("cannot read %s: %s\n", conf.c_str(), e.what());
  }
  testing::TempDir ta("accept_a"), tb("accept_b");
  const PipelineRun a = run_pipeline(ta.path(), conf, n_videos);
  record("end_to_end", [&] { return end_to_end(a, ta.path(), epochs); });
  const PipelineRun b = run_pipeline(tb.path(), conf, n_videos);
  record("determinism", [&] { return determinism(a, ta.path(), b, tb.path()); });

  std::size_t failed = 0;
  std::printf("\nsummary (%s)\n", conf.c_str());
  for (const auto& [name, o] : results) {
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%zu/%zu criteria passed\n", results.size() - failed, results.size());
  return failed == 0 ? 0 : 1;
}
