// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"

#include <atomic>

#include <unistd.h>

#include "rovf/cli/cli.hpp"

namespace rovf::testing {

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("rovf_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double stddev) {
  std::normal_distribution<double> n(0.0, stddev);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = n(rng);
  return m;
}

ingest::Track steady_track(int video, int id, long first, long n, double w, double h, double x,
                           double y) {
  ingest::Track t;
  t.video_id = video;
  t.track_id = id;
  for (long f = first; f < first + n; ++f) t.boxes.push_back({f, x, y, w, h, false});
  return t;
}

int run(const std::vector<std::string>& args) { return cli::run_cli(args); }

}  // namespace rovf::testing
