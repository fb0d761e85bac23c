// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/cli/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rovf/cli/pipeline.hpp"
#include "rovf/cli/run_manifest.hpp"
#include "rovf/cli/svg.hpp"
#include "rovf/core/digest.hpp"
#include "rovf/core/error.hpp"
#include "rovf/core/kernels.hpp"
#include "rovf/eval/eval.hpp"
#include "rovf/ingest/frames.hpp"
#include "rovf/ingest/pixel_cache.hpp"
#include "rovf/ingest/synth.hpp"
#include "rovf/model/checkpoint.hpp"
#include "rovf/model/embed.hpp"
#include "rovf/train/trainer.hpp"

namespace rovf::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

// Every key a --config file may contain.
const std::set<std::string> kKnownKeys = {
    // synth
    "n_identities", "duration_s", "n_videos", "width", "height", "box_scale",
    // ingest
    "clip_seconds", "fps", "stagger_seconds", "min_box", "resize_to", "source_fps",
    // encoder
    "kind", "patch_size", "d_model", "trainable", "channels",
    // head
    "n_latents", "n_layers", "n_heads", "dropout", "d_ff", "out_dim",
    // trainer
    "epochs", "batch_triplets", "margin", "lr_start", "lr_peak", "lr_end", "warmup_fraction",
    "seed", "freeze_encoder", "candidates_j", "candidates_k", "optimizer", "clip_grad_norm",
    "checkpoint_epochs",
    // eval
    "n_sets"};

struct Globals {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string config;
};

KeyValues load_config(const Globals& g) {
  if (g.config.empty()) return {};
  KeyValues kv = KeyValues::load(g.config);
  for (const auto& [k, v] : kv.values()) {
    if (!kKnownKeys.count(k)) throw ValidationError(g.config + ": unknown config key '" + k + "'");
  }
  return kv;
}

std::map<std::string, std::string> snapshot(const KeyValues& kv) { return kv.values(); }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_input(const fs::path& p, const std::string& what) {
  if (!fs::exists(p)) throw ValidationError(what + " " + p.string() + " does not exist");
  if (fs::is_regular_file(p)) verify_recorded_checksum(p);
}

void write_text(const fs::path& p, const std::string& text) { write_file(p, text); }

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string out;
  std::optional<int> identities, videos;
  std::optional<double> duration, box_scale;
};

int cmd_synth(const Globals& g, const SynthArgs& a) {
  const auto t0 = Clock::now();
  KeyValues kv = load_config(g);
  ingest::SynthConfig cfg;
  kv.read("n_identities", cfg.n_identities);
  kv.read("duration_s", cfg.duration_s);
  kv.read("n_videos", cfg.n_videos);
  kv.read("width", cfg.width);
  kv.read("height", cfg.height);
  kv.read("box_scale", cfg.box_scale);
  kv.read("source_fps", cfg.source_fps);
  if (a.identities) cfg.n_identities = *a.identities;
  if (a.videos) cfg.n_videos = *a.videos;
  if (a.duration) cfg.duration_s = *a.duration;
  if (a.box_scale) cfg.box_scale = *a.box_scale;
  cfg.seed = g.seed;
  cfg.validate();

  const ingest::SynthWorld world = ingest::synth_tracks(cfg);
  const fs::path out(a.out);
  fs::create_directories(out / "frames");
  ingest::write_tracks(out / "tracks.csv", world.tracks);
  ingest::write_synth_descriptor(out / "frames" / "synthetic.json", cfg);
  std::ostringstream ids;
  ids << "video_id,track_id,identity\n";
  for (const auto& [key, id] : world.identity) {
    ids << key.video_id << ',' << key.track_id << ',' << id << '\n';
  }
  write_text(out / "identities.csv", ids.str());

  std::cout << "synth: " << world.tracks.size() << " tracks, " << cfg.n_identities
            << " identities, " << cfg.n_videos << " video(s) of " << cfg.n_frames()
            << " frames -> " << out.string() << "\n";
  RunManifest rm{"synth", snapshot(kv), {{"seed", g.seed}}, {},
                 {out / "tracks.csv", out / "frames" / "synthetic.json", out / "identities.csv"},
                 seconds_since(t0)};
  rm.write(out / "run_synth.json");
  return kExitOk;
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::string tracks, frames, out;
  std::optional<double> min_box;
  std::optional<int> clip_seconds, fps, resize, source_fps;
  std::optional<std::string> stagger;
  std::vector<int> videos;
};

int cmd_ingest(const Globals& g, const IngestArgs& a) {
  const auto t0 = Clock::now();
  KeyValues kv = load_config(g);
  ingest::IngestConfig cfg;
  read_ingest_config(kv, cfg);
  if (a.min_box) cfg.min_box = *a.min_box;
  if (a.clip_seconds) cfg.clip_seconds = *a.clip_seconds;
  if (a.fps) cfg.fps = *a.fps;
  if (a.resize) cfg.resize_to = *a.resize;
  if (a.source_fps) cfg.source_fps = *a.source_fps;
  if (a.stagger) cfg.stagger_seconds = ingest::Rational::parse(*a.stagger);
  cfg.validate();
  check_input(a.tracks, "tracks file");
  if (!a.frames.empty() && !fs::is_directory(a.frames)) {
    throw ValidationError("frames directory " + a.frames + " does not exist");
  }

  std::vector<ingest::Track> tracks = ingest::parse_tracks(a.tracks);
  if (!a.videos.empty()) {
    const std::set<int> keep(a.videos.begin(), a.videos.end());
    std::erase_if(tracks, [&](const ingest::Track& t) { return !keep.count(t.video_id); });
  }
  const ingest::ClipManifest m = ingest::make_manifest(tracks, cfg);
  ingest::save_manifest(a.out, m);

  const auto& s = m.stats;
  std::cout << "ingest: " << s.n_tracks << " tracks, " << s.n_boxes << " boxes, " << s.n_windows
            << " windows, " << s.n_rejected_visibility << " rejected (visibility), "
            << s.n_rejected_small << " rejected (min_box " << cfg.min_box << "), " << s.n_clips
            << " clips, " << m.graph.size() << " co-occurring track pairs\n";
  if (s.n_clips == 0) {
    std::cerr << "warning: no clips produced; every window was rejected\n";
  }
  if (!s.tracks_without_clips.empty()) {
    std::cout << "ingest: " << s.tracks_without_clips.size() << " track(s) produced no clips\n";
  }
  std::vector<fs::path> inputs{a.tracks};
  RunManifest rm{"ingest", snapshot(kv), {{"seed", g.seed}}, inputs, {a.out}, seconds_since(t0)};
  rm.write(a.out + ".run.json");
  return kExitOk;
}

// ------------------------------------------------- shared model plumbing

/// Keeps whatever backs a ClipEncoder alive.
struct EncoderBundle {
  std::shared_ptr<const ingest::FrameProvider> frames;
  std::unique_ptr<ingest::PixelCache> pixels;
  std::unique_ptr<encoders::EmbeddingStore> store;
  std::unique_ptr<encoders::ClipEncoder> encoder;
};

ingest::ClipManifest subset(const ingest::ClipManifest& m, const std::vector<long>& ids) {
  ingest::ClipManifest out = m;
  out.clips.clear();
  for (long id : ids) out.clips.push_back(m.clips[m.index_of(id)]);
  return out;
}

/// Toy encoder over pixels of `clips` (all manifest clips when empty), or
/// precomputed tokens from `embeddings`.
EncoderBundle open_encoder(const ingest::ClipManifest& m, encoders::ToyPatchEncoder* toy,
                           const std::string& frames_dir, const std::string& embeddings,
                           const std::vector<long>& clips = {}) {
  EncoderBundle b;
  if (toy) {
    if (frames_dir.empty()) throw ValidationError("the toy encoder needs --frames");
    if (toy->config().resize_to != m.config.resize_to) {
      throw ValidationError("encoder expects " + std::to_string(toy->config().resize_to) +
                            " px crops but the manifest was ingested at " +
                            std::to_string(m.config.resize_to));
    }
    b.frames = ingest::open_frame_source(frames_dir);
    b.pixels = std::make_unique<ingest::PixelCache>(
        ingest::PixelCache::build(clips.empty() ? m : subset(m, clips), *b.frames));
    b.encoder = std::make_unique<encoders::ToyClipEncoder>(*toy, *b.pixels);
  } else {
    if (embeddings.empty()) throw ValidationError("the precomputed encoder needs --embeddings");
    check_input(embeddings, "embedding file");
    b.store = std::make_unique<encoders::EmbeddingStore>(encoders::import_embeddings(embeddings));
    if (b.store->is_video_level()) {
      throw ValidationError(embeddings + " holds video-level embeddings, not frame tokens");
    }
    b.encoder = std::make_unique<encoders::PrecomputedClipEncoder>(*b.store);
  }
  return b;
}

void write_epochs_csv(const fs::path& p, const train::TrainStats& st) {
  std::ostringstream os;
  os.precision(17);
  os << "epoch,loss,seconds\n";
  for (std::size_t e = 0; e < st.epoch_loss.size(); ++e) {
    os << e + 1 << ',' << st.epoch_loss[e] << ',' << st.epoch_seconds[e] << '\n';
  }
  write_text(p, os.str());
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string manifest, frames, embeddings, out_dir;
  std::optional<int> epochs;
};

int cmd_train(const Globals& g, const TrainArgs& a) {
  const auto t0 = Clock::now();
  KeyValues kv = load_config(g);
  check_input(a.manifest, "manifest");
  const ingest::ClipManifest m = ingest::load_manifest(a.manifest);

  encoders::EncoderConfig ecfg;
  read_encoder_config(kv, ecfg);
  model::RoVFConfig rcfg;
  read_rovf_config(kv, rcfg);
  train::TrainConfig tcfg;
  train::read_train_config(kv, tcfg);
  tcfg.seed = g.seed;
  if (a.epochs) tcfg.epochs = *a.epochs;
  if (!a.embeddings.empty()) ecfg.kind = encoders::EncoderKind::kPrecomputed;
  ecfg.resize_to = m.config.resize_to;
  ecfg.validate();

  std::optional<encoders::ToyPatchEncoder> toy;
  if (ecfg.kind == encoders::EncoderKind::kToyPatch) {
    toy.emplace(ecfg, encoder_seed(g.seed));
  }
  EncoderBundle bundle = open_encoder(m, toy ? &*toy : nullptr, a.frames, a.embeddings);
  if (!toy) {
    ecfg.d_model = bundle.encoder->d_model();
    ecfg.trainable = false;
  }
  if (bundle.encoder->d_model() != rcfg.d_model) {
    throw ValidationError("incompatible dimensions: encoder " +
                          (a.embeddings.empty() ? std::string("toy_patch") : a.embeddings) +
                          " yields width " + std::to_string(bundle.encoder->d_model()) +
                          " but the head has d_model " + std::to_string(rcfg.d_model));
  }
  if (!ecfg.trainable) tcfg.freeze_encoder = true;
  tcfg.validate();

  model::Checkpoint ckpt;
  ckpt.model = model::RoVFModel(rcfg, model_seed(g.seed));
  ckpt.encoder_config = ecfg;
  ckpt.lineage.init_seed = model_seed(g.seed);
  ckpt.lineage.train_seed = g.seed;

  const fs::path out(a.out_dir);
  fs::create_directories(out);
  std::ofstream stats_csv(out / "stats.csv");
  std::ofstream triplets_csv(out / "triplets.csv");
  train::TrainStats::write_csv_header(stats_csv);
  miner::TripletLog triplet_log(triplets_csv);
  std::vector<fs::path> outputs;

  train::TrainHooks hooks;
  hooks.on_batch = [&](const train::BatchStats& b) { train::TrainStats::write_csv_row(stats_csv, b); };
  hooks.on_triplets = [&](const miner::TripletBatch& b, int epoch, int batch) {
    triplet_log.write(epoch, batch, b);
  };
  auto snapshot_ckpt = [&](int epochs_done, long steps) {
    model::Checkpoint c = ckpt;
    if (toy) c.encoder = *toy;
    c.lineage.epochs_completed = epochs_done;
    c.lineage.steps_completed = steps;
    return c;
  };
  hooks.on_checkpoint = [&](int epoch, long steps) {
    const fs::path p = out / ("checkpoint_epoch" + std::to_string(epoch) + ".rvfc");
    model::save_checkpoint(p, snapshot_ckpt(epoch, steps));
    outputs.push_back(p);
  };

  const train::TrainStats st = train::train(m, ckpt.model, *bundle.encoder, tcfg, hooks);
  for (std::size_t e = 0; e < st.epoch_loss.size(); ++e) {
    std::cout << "epoch " << e + 1 << ": loss " << st.epoch_loss[e] << ", "
              << st.epoch_seconds[e] << " s\n";
  }
  stats_csv.close();
  triplets_csv.close();
  model::save_checkpoint(out / "final.rvfc",
                         snapshot_ckpt(tcfg.epochs, static_cast<long>(st.batches.size())));
  write_epochs_csv(out / "epochs.csv", st);
  std::ostringstream conf;
  train::write_train_config(conf, tcfg);
  write_text(out / "train.conf", conf.str());
  for (const char* f : {"final.rvfc", "stats.csv", "triplets.csv", "epochs.csv", "train.conf"}) {
    outputs.push_back(out / f);
  }
  std::vector<fs::path> inputs{a.manifest};
  if (!a.embeddings.empty()) inputs.emplace_back(a.embeddings);
  RunManifest rm{"train", snapshot(kv),
                 {{"seed", g.seed}, {"encoder_init", encoder_seed(g.seed)},
                  {"model_init", model_seed(g.seed)}},
                 inputs, outputs, seconds_since(t0)};
  rm.write(out / "run_train.json");
  return kExitOk;
}

// ---------------------------------------------------------------- embed

struct EmbedArgs {
  std::string manifest, checkpoint, frames, embeddings, out;
};

int cmd_embed(const Globals& g, const EmbedArgs& a) {
  const auto t0 = Clock::now();
  KeyValues kv = load_config(g);
  check_input(a.manifest, "manifest");
  check_input(a.checkpoint, "checkpoint");
  const ingest::ClipManifest m = ingest::load_manifest(a.manifest);
  model::Checkpoint ckpt = model::load_checkpoint(a.checkpoint);
  EncoderBundle b = open_encoder(m, ckpt.encoder ? &*ckpt.encoder : nullptr, a.frames,
                                 a.embeddings);
  if (b.encoder->d_model() != ckpt.model.config().d_model) {
    throw ValidationError("incompatible dimensions: " + a.checkpoint + " expects width " +
                          std::to_string(ckpt.model.config().d_model) + ", encoder yields " +
                          std::to_string(b.encoder->d_model()));
  }
  const encoders::EmbeddingStore store = embed_manifest(m, ckpt.model, *b.encoder);
  encoders::save_embeddings(a.out, store);
  std::cout << "embed: " << store.size() << " clips x " << store.d_model() << " -> " << a.out
            << "\n";
  std::vector<fs::path> inputs{a.manifest, a.checkpoint};
  if (!a.embeddings.empty()) inputs.emplace_back(a.embeddings);
  RunManifest rm{"embed", snapshot(kv), {{"seed", g.seed}}, inputs, {a.out}, seconds_since(t0)};
  rm.write(a.out + ".run.json");
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string manifest, sets, sets_out, embedder = "rovf", checkpoint, frames, embeddings, out,
      ranks;
  std::optional<std::size_t> n_sets;
  bool filter = false;
  double filter_max_iou = 0.5;
  int random_dim = 32;
};

int cmd_eval(const Globals& g, const EvalArgs& a) {
  const auto t0 = Clock::now();
  KeyValues kv = load_config(g);
  check_input(a.manifest, "manifest");
  const ingest::ClipManifest m = ingest::load_manifest(a.manifest);
  std::vector<fs::path> inputs{a.manifest};
  std::vector<fs::path> outputs;

  eval::EvalSets sets;
  if (!a.sets.empty()) {
    check_input(a.sets, "eval sets");
    sets = eval::load_eval_sets(a.sets);
    for (const auto& s : sets.sets) eval::validate_eval_set(m, s);
    inputs.emplace_back(a.sets);
  } else {
    std::size_t n = 100;
    kv.read("n_sets", n);
    if (a.n_sets) n = *a.n_sets;
    sets = eval::generate_eval_sets(m, n, eval_seed(g.seed), {a.filter, a.filter_max_iou});
  }
  if (!a.sets_out.empty()) {
    eval::save_eval_sets(a.sets_out, sets);
    outputs.emplace_back(a.sets_out);
  }
  const std::vector<long> clips = eval::referenced_clips(sets);

  eval::EmbeddingTable table;
  if (a.embedder == "random") {
    const std::uint64_t s = derive_seed(g.seed, "eval.random");
    for (long id : clips) table[id] = random_embedding(s, id, a.random_dim);
  } else if (a.embedder == "rovf" && !a.embeddings.empty() && a.checkpoint.empty()) {
    check_input(a.embeddings, "embedding file");
    inputs.emplace_back(a.embeddings);
    const encoders::EmbeddingStore store = encoders::import_embeddings(a.embeddings);
    if (!store.is_video_level()) {
      throw ValidationError(a.embeddings + " holds frame tokens; pass --checkpoint to run the head");
    }
    for (long id : clips) {
      if (!store.contains(static_cast<std::uint64_t>(id))) {
        throw ValidationError(a.embeddings + " has no embedding for clip " + std::to_string(id));
      }
      table[id] = store.video_embedding(static_cast<std::uint64_t>(id));
    }
  } else if (a.embedder == "rovf" || a.embedder == "average") {
    if (a.checkpoint.empty()) throw ValidationError("--embedder " + a.embedder + " needs --checkpoint");
    check_input(a.checkpoint, "checkpoint");
    inputs.emplace_back(a.checkpoint);
    model::Checkpoint ckpt = model::load_checkpoint(a.checkpoint);
    EncoderBundle b = open_encoder(m, ckpt.encoder ? &*ckpt.encoder : nullptr, a.frames,
                                   a.embeddings, clips);
    if (a.embedder == "rovf") {
      const Matrix emb = model::embed_clips(ckpt.model, *b.encoder, clips);
      for (std::size_t i = 0; i < clips.size(); ++i) {
        const auto row = emb.row(i);
        table[clips[i]] = round_to_float({row.begin(), row.end()});
      }
    } else {
      for (long id : clips) table[id] = encoders::average_baseline(b.encoder->encode(id));
    }
  } else {
    throw ValidationError("unknown embedder '" + a.embedder + "' (rovf, average, random)");
  }

  const eval::EvalReport report = eval::evaluate(sets, table);
  write_text(a.out, eval::report_to_json(report));
  outputs.emplace_back(a.out);
  const std::string ranks = a.ranks.empty() ? (fs::path(a.out).replace_extension(".ranks.csv")).string()
                                            : a.ranks;
  std::ostringstream rt;
  eval::write_rank_table(rt, report);
  write_text(ranks, rt.str());
  outputs.emplace_back(ranks);

  std::printf("eval: %zu sets, %zu queries, top-1 %.1f%% [%.1f, %.1f], top-3 %.1f%% [%.1f, %.1f]\n",
              report.n_sets, report.n_queries, 100 * report.top1, 100 * report.top1_ci.lo,
              100 * report.top1_ci.hi, 100 * report.top3, 100 * report.top3_ci.lo,
              100 * report.top3_ci.hi);
  std::fflush(stdout);
  RunManifest rm{"eval", snapshot(kv), {{"seed", g.seed}, {"eval_sets", sets.seed}}, inputs,
                 outputs, seconds_since(t0)};
  rm.write(a.out + ".run.json");
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::string stats, epochs_csv, out_dir;
  std::vector<std::string> evals, models;
  std::vector<int> epochs;
};

std::vector<std::vector<std::string>> read_csv(const fs::path& p, const std::string& header) {
  std::istringstream in(read_file(p));
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(p.string() + " is empty");
  if (line != header) {
    throw ValidationError(p.string() + ": expected header '" + header + "', got '" + line + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw ValidationError(p.string() + " has no data rows");
  return rows;
}

double to_double(const std::string& s, const fs::path& source) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(source.string() + ": malformed number '" + s + "'");
  }
}

int cmd_report(const Globals& g, const ReportArgs& a) {
  const auto t0 = Clock::now();
  KeyValues kv = load_config(g);
  check_input(a.stats, "stats file");
  const auto rows = read_csv(a.stats, "step,epoch,lr,loss,active_frac,d_ap,d_an");
  std::vector<double> step, lr, loss;
  int last_epoch = 0;
  for (const auto& r : rows) {
    if (r.size() != 7) throw ValidationError(a.stats + ": rows need 7 fields");
    step.push_back(to_double(r[0], a.stats));
    last_epoch = std::max(last_epoch, static_cast<int>(to_double(r[1], a.stats)));
    lr.push_back(to_double(r[2], a.stats));
    loss.push_back(to_double(r[3], a.stats));
  }
  std::optional<double> epoch_time;
  std::vector<fs::path> inputs{a.stats};
  if (!a.epochs_csv.empty()) {
    check_input(a.epochs_csv, "epochs file");
    inputs.emplace_back(a.epochs_csv);
    double sum = 0;
    const auto er = read_csv(a.epochs_csv, "epoch,loss,seconds");
    for (const auto& r : er) sum += to_double(r.at(2), a.epochs_csv);
    epoch_time = sum / static_cast<double>(er.size());
  }
  if (a.models.size() != a.evals.size()) {
    throw ValidationError("report: give one --model per --eval");
  }
  if (!a.epochs.empty() && a.epochs.size() != a.evals.size()) {
    throw ValidationError("report: give one --epochs per --eval, or none");
  }

  const fs::path out(a.out_dir);
  fs::create_directories(out);
  std::ostringstream metrics;
  metrics << "model,epochs,top1,top3,epoch_time_s\n";
  for (std::size_t i = 0; i < a.evals.size(); ++i) {
    check_input(a.evals[i], "eval report");
    inputs.emplace_back(a.evals[i]);
    const auto j = nlohmann::json::parse(read_file(a.evals[i]), nullptr, false);
    if (j.is_discarded() || !j.contains("top1") || !j.contains("top3")) {
      throw ValidationError(a.evals[i] + " is not an eval report");
    }
    char buf[160];
    const int epochs = a.epochs.empty() ? last_epoch : a.epochs[i];
    std::snprintf(buf, sizeof buf, "%s,%d,%.1f,%.1f,", a.models[i].c_str(), epochs,
                  100 * j["top1"].get<double>(), 100 * j["top3"].get<double>());
    metrics << buf;
    if (epoch_time) {
      std::snprintf(buf, sizeof buf, "%.2f", *epoch_time);
      metrics << buf;
    }
    metrics << '\n';
  }
  write_text(out / "metrics.csv", metrics.str());
  write_text(out / "loss.svg", line_plot_svg(step, loss, "Training loss", "step", "mean triplet loss"));
  write_text(out / "lr.svg", line_plot_svg(step, lr, "Learning rate", "step", "lr"));
  std::cout << metrics.str();
  RunManifest rm{"report", snapshot(kv), {{"seed", g.seed}}, inputs,
                 {out / "metrics.csv", out / "loss.svg", out / "lr.svg"}, seconds_since(t0)};
  rm.write(out / "run_report.json");
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"rovf: label-free video re-identification pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Root seed; every random stream is derived from it")
      ->capture_default_str();
  app.add_option("--threads", g.threads, "OpenMP threads (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--config", g.config, "Flat key=value config file")->check(CLI::ExistingFile);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic tracked dataset");
  synth->add_option("--out", sa.out, "Output directory")->required();
  synth->add_option("--identities", sa.identities, "Number of individuals");
  synth->add_option("--duration", sa.duration, "Video length in seconds");
  synth->add_option("--videos", sa.videos, "Number of videos");
  synth->add_option("--box-scale", sa.box_scale, "Scale factor for individual sizes");

  IngestArgs ia;
  auto* ingest = app.add_subcommand("ingest", "Cut tracks into clips and write a clip manifest");
  ingest->add_option("--tracks", ia.tracks, "Track CSV")->required();
  ingest->add_option("--frames", ia.frames, "Frames directory");
  ingest->add_option("--out", ia.out, "Manifest JSON")->required();
  ingest->add_option("--min-box", ia.min_box, "Largest box side must exceed this (px)");
  ingest->add_option("--clip-seconds", ia.clip_seconds, "Clip length in seconds");
  ingest->add_option("--fps", ia.fps, "Frames sampled per clip second");
  ingest->add_option("--stagger", ia.stagger, "Clip start spacing in seconds, e.g. 10/3");
  ingest->add_option("--resize", ia.resize, "Crop side after resizing (px)");
  ingest->add_option("--source-fps", ia.source_fps, "Frame rate of the annotated video");
  ingest->add_option("--videos", ia.videos, "Keep only these video ids")->delimiter(',');

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Mine triplets and train the recurrent head");
  train->add_option("--manifest", ta.manifest, "Clip manifest")->required();
  train->add_option("--frames", ta.frames, "Frames directory (toy encoder)");
  train->add_option("--embeddings", ta.embeddings, "Frame-token file (precomputed encoder)");
  train->add_option("--out-dir", ta.out_dir, "Output directory")->required();
  train->add_option("--epochs", ta.epochs, "Override the configured epoch count");

  EmbedArgs ea;
  auto* embed = app.add_subcommand("embed", "Write video embeddings for every clip of a manifest");
  embed->add_option("--manifest", ea.manifest, "Clip manifest")->required();
  embed->add_option("--checkpoint", ea.checkpoint, "Trained checkpoint")->required();
  embed->add_option("--frames", ea.frames, "Frames directory (toy encoder)");
  embed->add_option("--embeddings", ea.embeddings, "Frame-token file (precomputed encoder)");
  embed->add_option("--out", ea.out, "Embedding file")->required();

  EvalArgs va;
  auto* ev = app.add_subcommand("eval", "Top-1/top-3 retrieval on generated eval sets");
  ev->add_option("--manifest", va.manifest, "Clip manifest")->required();
  ev->add_option("--sets", va.sets, "Existing eval sets JSON (otherwise generated)");
  ev->add_option("--sets-out", va.sets_out, "Write the eval sets used");
  ev->add_option("--n-sets", va.n_sets, "Number of sets to generate (default 100)");
  ev->add_flag("--filter", va.filter, "Drop sets whose positives overlap heavily in the frame");
  ev->add_option("--filter-max-iou", va.filter_max_iou, "Overlap threshold of --filter")
      ->capture_default_str();
  ev->add_option("--embedder", va.embedder, "rovf | average | random")->capture_default_str();
  ev->add_option("--checkpoint", va.checkpoint, "Checkpoint for rovf/average embedders");
  ev->add_option("--frames", va.frames, "Frames directory (toy encoder)");
  ev->add_option("--embeddings", va.embeddings,
                 "Video embeddings (rovf without --checkpoint) or frame tokens");
  ev->add_option("--random-dim", va.random_dim, "Width of random embeddings")
      ->capture_default_str();
  ev->add_option("--out", va.out, "Report JSON")->required();
  ev->add_option("--ranks", va.ranks, "Rank table CSV (default <out>.ranks.csv)");

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Metrics table and loss/lr plots");
  report->add_option("--stats", ra.stats, "Training stats CSV")->required();
  report->add_option("--epochs-csv", ra.epochs_csv, "Per-epoch CSV for the epoch time column");
  report->add_option("--eval", ra.evals, "Eval report JSON (repeatable)");
  report->add_option("--model", ra.models, "Row label for each --eval");
  report->add_option("--epochs", ra.epochs, "Epoch column for each --eval");
  report->add_option("--out-dir", ra.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g.threads > 0) kernels::set_num_threads(g.threads);
    if (*synth) return cmd_synth(g, sa);
    if (*ingest) return cmd_ingest(g, ia);
    if (*train) return cmd_train(g, ta);
    if (*embed) return cmd_embed(g, ea);
    if (*ev) return cmd_eval(g, va);
    if (*report) return cmd_report(g, ra);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("rovf");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  return run_cli(static_cast<int>(storage.size()), argv.data());
}

}  // namespace rovf::cli
