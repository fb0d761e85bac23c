// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace rovf::cli {

/// Provenance record written next to every command's outputs. Inputs carry
/// git blob hashes, outputs SHA-256; paths are stored relative to the record.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::map<std::string, std::uint64_t> seeds;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
  double wall_seconds = 0.0;

  void write(const std::filesystem::path& path) const;
};

/// If a run record beside `file` (`<file>.run.json` or `run_*.json` in the
/// same directory) lists it as an output, checks the recorded SHA-256 and
/// throws FormatError naming the file on mismatch.
void verify_recorded_checksum(const std::filesystem::path& file);

}  // namespace rovf::cli
