// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "rovf/encoders/encoder.hpp"
#include "rovf/model/rovf.hpp"

namespace rovf::model {

/// Where a set of weights came from.
struct Lineage {
  std::uint64_t init_seed = 0;
  std::uint64_t train_seed = 0;
  int epochs_completed = 0;
  long steps_completed = 0;

  friend bool operator==(const Lineage&, const Lineage&) = default;
};

struct Checkpoint {
  RoVFModel model;
  encoders::EncoderConfig encoder_config;
  std::optional<encoders::ToyPatchEncoder> encoder;  // present for toy_patch
  Lineage lineage;
};

/// Self-describing checkpoint container:
///   "RVFC" | u16 version = 1 | u32 header_bytes | JSON header | payload
/// The JSON header carries both configs, the lineage, the parameter block
/// index (name, shape, offset in floats) and the SHA-256 of the payload. The
/// payload is every block as little-endian float32, in index order.
std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(std::string_view bytes, const std::string& source_name);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace rovf::model
