// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rovf/core/matrix.hpp"
#include "rovf/core/random.hpp"
#include "rovf/ingest/track.hpp"

namespace rovf::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double stddev = 1.0);

/// Always-visible track with constant boxes over frames [first, first + n).
ingest::Track steady_track(int video, int id, long first, long n, double w, double h,
                           double x = 10.0, double y = 10.0);

/// Runs the CLI with a fresh argument vector.
int run(const std::vector<std::string>& args);

}  // namespace rovf::testing
