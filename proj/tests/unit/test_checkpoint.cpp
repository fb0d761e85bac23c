// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "rovf/core/digest.hpp"
#include "rovf/core/error.hpp"
#include "rovf/model/checkpoint.hpp"

namespace rovf::model {
namespace {

Checkpoint make_checkpoint(bool with_encoder) {
  RoVFConfig cfg;
  cfg.d_model = 8;
  cfg.n_latents = 3;
  cfg.n_layers = 1;
  cfg.n_heads = 2;
  cfg.d_ff = 12;
  cfg.out_dim = 5;
  Checkpoint c;
  c.model = RoVFModel(cfg, 17);
  c.encoder_config.d_model = 8;
  c.encoder_config.resize_to = 16;
  c.encoder_config.patch_size = 8;
  if (with_encoder) c.encoder = encoders::ToyPatchEncoder(c.encoder_config, 3);
  else c.encoder_config.kind = encoders::EncoderKind::kPrecomputed;
  c.lineage = {17, 99, 5, 120};
  return c;
}

TEST(Checkpoint, SaveLoadSaveIsByteIdentical) {
  for (bool enc : {true, false}) {
    const Checkpoint c = make_checkpoint(enc);
    const std::string bytes = serialize_checkpoint(c);
    EXPECT_EQ(bytes.substr(0, 4), "RVFC");
    const Checkpoint back = deserialize_checkpoint(bytes, "c.rvfc");
    EXPECT_EQ(back.model.config(), c.model.config());
    EXPECT_EQ(back.lineage, c.lineage);
    EXPECT_EQ(back.encoder_config, c.encoder_config);
    EXPECT_EQ(back.encoder.has_value(), enc);
    EXPECT_EQ(serialize_checkpoint(back), bytes);
  }
}

TEST(Checkpoint, StoresFloat32Values) {
  const Checkpoint c = make_checkpoint(true);
  const Checkpoint back = deserialize_checkpoint(serialize_checkpoint(c), "c");
  for (std::size_t i = 0; i < c.model.params().size(); ++i) {
    const auto& a = c.model.params()[i];
    const auto& b = back.model.params()[i];
    EXPECT_EQ(a.name, b.name);
    for (std::size_t e = 0; e < a.value.size(); ++e)
      EXPECT_EQ(b.value.values()[e], static_cast<double>(static_cast<float>(a.value.values()[e])));
  }
}

TEST(Checkpoint, DetectsCorruption) {
  const std::string bytes = serialize_checkpoint(make_checkpoint(true));
  std::string flipped = bytes;
  flipped[flipped.size() - 3] ^= 0x10;
  EXPECT_THROW(deserialize_checkpoint(flipped, "c"), FormatError);
  EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, bytes.size() - 4), "c"), FormatError);
  std::string magic = bytes;
  magic[1] = 'X';
  EXPECT_THROW(deserialize_checkpoint(magic, "c"), FormatError);
  EXPECT_THROW(deserialize_checkpoint("RVFC", "c"), FormatError);
  try {
    deserialize_checkpoint(flipped, "run/final.rvfc");
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("run/final.rvfc"), std::string::npos);
  }
}

TEST(Checkpoint, FileRoundTrip) {
  testing::TempDir dir("ckpt");
  const Checkpoint c = make_checkpoint(true);
  save_checkpoint(dir / "a.rvfc", c);
  save_checkpoint(dir / "b.rvfc", load_checkpoint(dir / "a.rvfc"));
  EXPECT_EQ(read_file(dir / "a.rvfc"), read_file(dir / "b.rvfc"));
  EXPECT_THROW(load_checkpoint(dir / "missing.rvfc"), ValidationError);
}

}  // namespace
}  // namespace rovf::model
