// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference against OpenMP kernels, plus clip embedding at 1 thread
// against all threads. Run with --benchmark_counters_tabular=true.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "rovf/core/kernels.hpp"
#include "rovf/core/random.hpp"
#include "rovf/encoders/clip_encoder.hpp"
#include "rovf/encoders/embedding_store.hpp"
#include "rovf/model/embed.hpp"

namespace {

using namespace rovf;

Matrix filled(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> d;
  Matrix m(r, c);
  for (double& v : m.values()) v = d(rng);
  return m;
}

template <void (*Kernel)(const Matrix&, const Matrix&, Matrix&)>
void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = filled(n, n, 1), b = filled(n, n, 2);
  Matrix c(n, n);
  for (auto _ : state) {
    Kernel(a, b, c);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n * n));
}

template <void (*Kernel)(const Matrix&, const Matrix&, Matrix&)>
void BM_PairwiseDist(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix x = filled(n, 64, 3), y = filled(n, 64, 4);
  Matrix out(n, n);
  for (auto _ : state) {
    Kernel(x, y, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n));
}

BENCHMARK(BM_Matmul<kernels::serial::matmul>)->Name("matmul/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_Matmul<kernels::parallel::matmul>)->Name("matmul/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_Matmul<kernels::serial::matmul_nt>)->Name("matmul_nt/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_Matmul<kernels::parallel::matmul_nt>)->Name("matmul_nt/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_PairwiseDist<kernels::serial::pairwise_sq_dist>)->Name("pairwise/serial")->Arg(512);
BENCHMARK(BM_PairwiseDist<kernels::parallel::pairwise_sq_dist>)->Name("pairwise/parallel")->Arg(512);

// Desk-scale head over 64 clips of 10 frames x 16 tokens.
void BM_EmbedClips(benchmark::State& state) {
  static const int all_threads = kernels::max_threads();
  const int threads = static_cast<int>(state.range(0));
  model::RoVFConfig cfg;
  cfg.d_model = 32;
  cfg.n_latents = 8;
  cfg.n_heads = 4;
  cfg.d_ff = 128;
  cfg.out_dim = 32;
  const model::RoVFModel m(cfg, 5);
  encoders::EmbeddingStore store(32);
  Rng rng(6);
  std::normal_distribution<float> d;
  std::vector<long> ids;
  for (long id = 0; id < 64; ++id) {
    encoders::ClipEmbedding c{10, 16, std::vector<float>(10 * 16 * 32)};
    for (float& v : c.values) v = d(rng);
    store.insert(static_cast<std::uint64_t>(id), std::move(c));
    ids.push_back(id);
  }
  const encoders::PrecomputedClipEncoder enc(store);
  kernels::set_num_threads(threads > 0 ? threads : all_threads);
  for (auto _ : state) {
    Matrix e = model::embed_clips(m, enc, ids);
    benchmark::DoNotOptimize(e.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(ids.size()));
  state.counters["threads"] = kernels::max_threads();
}
// 0 = every available thread
BENCHMARK(BM_EmbedClips)->Name("embed_clips")->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
