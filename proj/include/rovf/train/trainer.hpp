// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "rovf/core/keyvalue.hpp"
#include "rovf/encoders/clip_encoder.hpp"
#include "rovf/ingest/manifest.hpp"
#include "rovf/miner/miner.hpp"
#include "rovf/model/rovf.hpp"
#include "rovf/train/optimizer.hpp"
#include "rovf/train/schedule.hpp"

namespace rovf::train {

struct TrainConfig {
  int epochs = 10;
  std::size_t batch_triplets = 10;
  double margin = 1.0;
  double lr_start = 1e-4;
  double lr_peak = 5e-4;
  double lr_end = 1e-5;
  double warmup_fraction = 0.05;
  std::uint64_t seed = 0;
  bool freeze_encoder = false;

  std::size_t candidates_j = miner::kDefaultCandidates;
  std::size_t candidates_k = miner::kDefaultCandidates;
  std::string optimizer = "sgd";  // sgd | adam
  double clip_grad_norm = 0.0;    // 0 disables clipping
  std::vector<int> checkpoint_epochs{5, 10};

  ScheduleConfig schedule() const { return {lr_start, lr_peak, lr_end, warmup_fraction}; }
  void validate() const;
};

/// Reads the TrainConfig keys present in `kv`; field names are the keys.
void read_train_config(const KeyValues& kv, TrainConfig& cfg);
void write_train_config(std::ostream& out, const TrainConfig& cfg);

struct BatchStats {
  long step = 0;
  int epoch = 0;  // 1-based
  double lr = 0.0;
  double loss = 0.0;         // mean triplet loss of the batch (train mode)
  double active_frac = 0.0;  // share of triplets with loss > 0
  double d_ap = 0.0;
  double d_an = 0.0;
};

struct TrainStats {
  std::vector<BatchStats> batches;
  std::vector<double> epoch_loss;     // mean over the epoch's triplets
  std::vector<double> epoch_seconds;  // wall time

  /// `step,epoch,lr,loss,active_frac,d_ap,d_an`
  static void write_csv_header(std::ostream& out);
  static void write_csv_row(std::ostream& out, const BatchStats& b);
};

/// Non-finite loss or gradient. The message names the triplet(s) involved.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainHooks {
  std::function<void(const BatchStats&)> on_batch;
  std::function<void(const miner::TripletBatch&, int epoch, int batch)> on_triplets;
  /// Called after each epoch listed in TrainConfig::checkpoint_epochs.
  std::function<void(int epoch, long steps)> on_checkpoint;
};

/// Steps per epoch: each anchor-eligible track is drawn exactly once per
/// epoch (shuffled), batch_triplets anchors per step, last batch may be short.
long steps_per_epoch(std::size_t n_anchors, std::size_t batch_triplets);

/// Trains `model` (and the encoder's parameters unless frozen or not
/// trainable) in place.
///
/// Per step: mine a batch in eval mode, then for every triplet build a graph
/// in train mode, take the triplet loss scaled by 1/batch and back-propagate.
/// Triplets run in parallel with private gradients that are summed in
/// triplet order, so results do not depend on the thread count.
TrainStats train(const ingest::ClipManifest& manifest, model::RoVFModel& model,
                 encoders::ClipEncoder& encoder, const TrainConfig& cfg,
                 const TrainHooks& hooks = {});

}  // namespace rovf::train
