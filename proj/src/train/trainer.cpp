// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>

#include "rovf/core/error.hpp"
#include "rovf/core/kernels.hpp"

namespace rovf::train {

void TrainConfig::validate() const {
  if (epochs < 1) throw ValidationError("train config: epochs must be >= 1");
  if (batch_triplets < 1) throw ValidationError("train config: batch_triplets must be >= 1");
  if (!(margin >= 0.0)) throw ValidationError("train config: margin must be >= 0");
  if (candidates_j < 2 || candidates_k < 1) {
    throw ValidationError("train config: candidates_j must be >= 2 and candidates_k >= 1");
  }
  if (!(clip_grad_norm >= 0.0)) throw ValidationError("train config: clip_grad_norm must be >= 0");
  optimizer_kind_from_string(optimizer);
  schedule().validate();
}

void read_train_config(const KeyValues& kv, TrainConfig& cfg) {
  kv.read("epochs", cfg.epochs);
  kv.read("batch_triplets", cfg.batch_triplets);
  kv.read("margin", cfg.margin);
  kv.read("lr_start", cfg.lr_start);
  kv.read("lr_peak", cfg.lr_peak);
  kv.read("lr_end", cfg.lr_end);
  kv.read("warmup_fraction", cfg.warmup_fraction);
  kv.read("seed", cfg.seed);
  kv.read("freeze_encoder", cfg.freeze_encoder);
  kv.read("candidates_j", cfg.candidates_j);
  kv.read("candidates_k", cfg.candidates_k);
  kv.read("optimizer", cfg.optimizer);
  kv.read("clip_grad_norm", cfg.clip_grad_norm);
  kv.read("checkpoint_epochs", cfg.checkpoint_epochs);
}

void write_train_config(std::ostream& out, const TrainConfig& cfg) {
  const auto old = out.precision(17);
  out << "epochs=" << cfg.epochs << '\n'
      << "batch_triplets=" << cfg.batch_triplets << '\n'
      << "margin=" << cfg.margin << '\n'
      << "lr_start=" << cfg.lr_start << '\n'
      << "lr_peak=" << cfg.lr_peak << '\n'
      << "lr_end=" << cfg.lr_end << '\n'
      << "warmup_fraction=" << cfg.warmup_fraction << '\n'
      << "seed=" << cfg.seed << '\n'
      << "freeze_encoder=" << (cfg.freeze_encoder ? "true" : "false") << '\n'
      << "candidates_j=" << cfg.candidates_j << '\n'
      << "candidates_k=" << cfg.candidates_k << '\n'
      << "optimizer=" << cfg.optimizer << '\n'
      << "clip_grad_norm=" << cfg.clip_grad_norm << '\n'
      << "checkpoint_epochs=";
  for (std::size_t i = 0; i < cfg.checkpoint_epochs.size(); ++i) {
    out << (i ? "," : "") << cfg.checkpoint_epochs[i];
  }
  out << '\n';
  out.precision(old);
}

void TrainStats::write_csv_header(std::ostream& out) {
  out << "step,epoch,lr,loss,active_frac,d_ap,d_an\n";
}

void TrainStats::write_csv_row(std::ostream& out, const BatchStats& b) {
  const auto old = out.precision(17);
  out << b.step << ',' << b.epoch << ',' << b.lr << ',' << b.loss << ',' << b.active_frac << ','
      << b.d_ap << ',' << b.d_an << '\n';
  out.precision(old);
}

long steps_per_epoch(std::size_t n_anchors, std::size_t batch_triplets) {
  if (batch_triplets == 0) throw ValidationError("batch_triplets must be >= 1");
  return static_cast<long>((n_anchors + batch_triplets - 1) / batch_triplets);
}

namespace {

struct TripletResult {
  double loss = 0.0;
  double d_ap = 0.0;
  double d_an = 0.0;
  Gradients head;
  Gradients encoder;
};

TripletResult run_triplet(const model::RoVFModel& model, const encoders::ClipEncoder& encoder,
                          const ParameterSet* encoder_params, const miner::Triplet& t,
                          double margin, double scale, Rng& rng) {
  TripletResult r;
  r.head = Gradients(model.params());
  if (encoder_params) r.encoder = Gradients(*encoder_params);
  Gradients* enc_grads = encoder_params ? &r.encoder : nullptr;

  Graph g;
  auto embed = [&](long clip) {
    const std::vector<Var> frames = encoder.encode(g, clip, enc_grads);
    return model.forward(g, frames, model::Mode::kTrain, &rng, &r.head);
  };
  const Var a = embed(t.anchor);
  const Var p = embed(t.positive);
  const Var n = embed(t.negative);
  const Var loss = g.triplet_loss(a, p, n, margin);
  r.loss = g.value(loss)(0, 0);
  r.d_ap = kernels::euclidean(g.value(a).row(0), g.value(p).row(0));
  r.d_an = kernels::euclidean(g.value(a).row(0), g.value(n).row(0));
  if (std::isfinite(r.loss)) g.backward(loss, scale);
  return r;
}

std::string describe(const miner::Triplet& t) {
  std::ostringstream os;
  os << "(anchor " << t.anchor << ", positive " << t.positive << ", negative " << t.negative
     << ")";
  return os.str();
}

}  // namespace

TrainStats train(const ingest::ClipManifest& manifest, model::RoVFModel& model,
                 encoders::ClipEncoder& encoder, const TrainConfig& cfg, const TrainHooks& hooks) {
  cfg.validate();
  if (encoder.d_model() != model.config().d_model) {
    throw ValidationError("train: encoder width " + std::to_string(encoder.d_model()) +
                          " does not match model d_model " +
                          std::to_string(model.config().d_model));
  }
  const miner::CandidateSampler sampler(manifest);
  // Encoders without parameters (imported embeddings) are frozen by construction.
  ParameterSet* encoder_params = cfg.freeze_encoder ? nullptr : encoder.parameters();

  const std::size_t n_anchors = sampler.anchors().size();
  const long per_epoch = steps_per_epoch(n_anchors, cfg.batch_triplets);
  const long total = per_epoch * cfg.epochs;
  const ScheduleConfig sched = cfg.schedule();
  const OptimizerConfig opt_cfg{optimizer_kind_from_string(cfg.optimizer)};
  auto head_opt = make_optimizer(opt_cfg);
  auto enc_opt = make_optimizer(opt_cfg);
  const miner::BatchOptions mining{cfg.candidates_j, cfg.candidates_k};

  TrainStats stats;
  long step = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng order_rng = make_rng(cfg.seed, "train.anchor_order", {std::uint64_t(epoch)});
    const std::vector<miner::TrackKey> order =
        sample_without_replacement(sampler.anchors(), n_anchors, order_rng);
    double epoch_loss_sum = 0.0;
    std::size_t epoch_triplets = 0;

    for (long b = 0; b < per_epoch; ++b, ++step) {
      const std::size_t lo = static_cast<std::size_t>(b) * cfg.batch_triplets;
      const std::size_t hi = std::min(lo + cfg.batch_triplets, n_anchors);
      Rng mine_rng = make_rng(cfg.seed, "miner.batch", {std::uint64_t(epoch), std::uint64_t(b)});
      const miner::TripletBatch batch =
          miner::build_batch(sampler, model, encoder,
                             std::span<const miner::TrackKey>(order).subspan(lo, hi - lo), mining, mine_rng);
      if (hooks.on_triplets) hooks.on_triplets(batch, epoch, static_cast<int>(b));

      const auto n = static_cast<std::ptrdiff_t>(batch.triplets.size());
      const double scale = 1.0 / static_cast<double>(n);
      std::vector<TripletResult> results(batch.triplets.size());
      std::vector<std::exception_ptr> errors(batch.triplets.size());
#pragma omp parallel for schedule(dynamic, 1) if (n > 1)
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        try {
          Rng drop = make_rng(cfg.seed, "train.dropout",
                              {std::uint64_t(epoch), std::uint64_t(b), std::uint64_t(ui)});
          results[ui] = run_triplet(model, encoder, encoder_params, batch.triplets[ui].triplet,
                                    cfg.margin, scale, drop);
        } catch (...) {
          errors[ui] = std::current_exception();
        }
      }
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }

      BatchStats bs;
      bs.step = step;
      bs.epoch = epoch;
      bs.lr = lr_at(step, per_epoch, total, sched);
      Gradients head_grad(model.params());
      Gradients enc_grad;
      if (encoder_params) enc_grad = Gradients(*encoder_params);
      std::string bad;
      for (std::size_t i = 0; i < results.size(); ++i) {
        const TripletResult& r = results[i];
        if (!std::isfinite(r.loss)) bad += " " + describe(batch.triplets[i].triplet);
        bs.loss += r.loss;
        bs.active_frac += r.loss > 0.0 ? 1.0 : 0.0;
        bs.d_ap += r.d_ap;
        bs.d_an += r.d_an;
        head_grad.add(r.head);
        if (encoder_params) enc_grad.add(r.encoder);
      }
      if (!bad.empty()) {
        throw TrainingDiverged("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                               std::to_string(step) + "; triplets:" + bad);
      }
      epoch_loss_sum += bs.loss;
      epoch_triplets += results.size();
      bs.loss *= scale;
      bs.active_frac *= scale;
      bs.d_ap *= scale;
      bs.d_an *= scale;

      double norm2 = head_grad.squared_norm() + (encoder_params ? enc_grad.squared_norm() : 0.0);
      if (!std::isfinite(norm2)) {
        std::string all;
        for (const auto& m : batch.triplets) all += " " + describe(m.triplet);
        throw TrainingDiverged("non-finite gradient at epoch " + std::to_string(epoch) +
                               ", step " + std::to_string(step) + "; triplets:" + all);
      }
      if (cfg.clip_grad_norm > 0.0 && std::sqrt(norm2) > cfg.clip_grad_norm) {
        const double s = cfg.clip_grad_norm / std::sqrt(norm2);
        head_grad.scale(s);
        if (encoder_params) enc_grad.scale(s);
      }
      head_opt->step(model.params(), head_grad, bs.lr);
      if (encoder_params) enc_opt->step(*encoder_params, enc_grad, bs.lr);

      stats.batches.push_back(bs);
      if (hooks.on_batch) hooks.on_batch(bs);
    }
    stats.epoch_loss.push_back(epoch_loss_sum / static_cast<double>(epoch_triplets));
    stats.epoch_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    if (hooks.on_checkpoint &&
        std::find(cfg.checkpoint_epochs.begin(), cfg.checkpoint_epochs.end(), epoch) !=
            cfg.checkpoint_epochs.end()) {
      hooks.on_checkpoint(epoch, step);
    }
  }
  return stats;
}

}  // namespace rovf::train
