// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/model/checkpoint.hpp"

#include <bit>
#include <cstring>

#include <json.hpp>

#include "rovf/core/digest.hpp"
#include "rovf/core/error.hpp"

namespace rovf::model {

using Json = nlohmann::ordered_json;

namespace {

constexpr char kMagic[4] = {'R', 'V', 'F', 'C'};
constexpr std::uint16_t kVersion = 1;

Json rovf_config_json(const RoVFConfig& c) {
  Json j;
  j["d_model"] = c.d_model;
  j["n_latents"] = c.n_latents;
  j["n_layers"] = c.n_layers;
  j["n_heads"] = c.n_heads;
  j["dropout"] = c.dropout;
  j["d_ff"] = c.ff_width();
  j["out_dim"] = c.out_dim;
  return j;
}

RoVFConfig rovf_config_from(const Json& j) {
  RoVFConfig c;
  c.d_model = j.at("d_model").get<int>();
  c.n_latents = j.at("n_latents").get<int>();
  c.n_layers = j.at("n_layers").get<int>();
  c.n_heads = j.at("n_heads").get<int>();
  c.dropout = j.at("dropout").get<double>();
  c.d_ff = j.at("d_ff").get<int>();
  c.out_dim = j.at("out_dim").get<int>();
  c.validate();
  return c;
}

Json encoder_config_json(const encoders::EncoderConfig& c) {
  Json j;
  j["kind"] = encoders::to_string(c.kind);
  j["patch_size"] = c.patch_size;
  j["d_model"] = c.d_model;
  j["trainable"] = c.trainable;
  j["resize_to"] = c.resize_to;
  j["channels"] = c.channels;
  return j;
}

encoders::EncoderConfig encoder_config_from(const Json& j) {
  encoders::EncoderConfig c;
  c.kind = encoders::encoder_kind_from_string(j.at("kind").get<std::string>());
  c.patch_size = j.at("patch_size").get<int>();
  c.d_model = j.at("d_model").get<int>();
  c.trainable = j.at("trainable").get<bool>();
  c.resize_to = j.at("resize_to").get<int>();
  c.channels = j.at("channels").get<int>();
  c.validate();
  return c;
}

void append_block(std::string& payload, Json& blocks, const Parameter& p, std::size_t& offset) {
  Json b;
  b["name"] = p.name;
  b["shape"] = Json::array({p.value.rows(), p.value.cols()});
  b["offset"] = offset;
  blocks.push_back(std::move(b));
  for (double v : p.value.values()) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int i = 0; i < 4; ++i) payload.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
  offset += p.value.size();
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  std::string payload;
  Json blocks = Json::array();
  std::size_t offset = 0;
  for (const Parameter& p : ckpt.model.params()) append_block(payload, blocks, p, offset);
  if (ckpt.encoder) {
    for (const Parameter& p : ckpt.encoder->params()) append_block(payload, blocks, p, offset);
  }
  Json header;
  header["format"] = "rovf-checkpoint";
  header["rovf_config"] = rovf_config_json(ckpt.model.config());
  header["encoder_config"] = encoder_config_json(ckpt.encoder_config);
  header["lineage"] = {{"init_seed", ckpt.lineage.init_seed},
                       {"train_seed", ckpt.lineage.train_seed},
                       {"epochs_completed", ckpt.lineage.epochs_completed},
                       {"steps_completed", ckpt.lineage.steps_completed}};
  header["blocks"] = std::move(blocks);
  header["payload_floats"] = offset;
  header["payload_sha256"] = sha256_hex(payload);
  const std::string header_text = header.dump();

  std::string out(kMagic, 4);
  out.push_back(static_cast<char>(kVersion & 0xFF));
  out.push_back(static_cast<char>(kVersion >> 8));
  const auto len = static_cast<std::uint32_t>(header_text.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((len >> (8 * i)) & 0xFF));
  out += header_text;
  out += payload;
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes, const std::string& source_name) {
  auto u8 = [&](std::size_t i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i])); };
  if (bytes.size() < 10 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError(source_name + ": not a checkpoint (bad magic)");
  }
  const std::uint32_t version = u8(4) | (u8(5) << 8);
  if (version != kVersion) {
    throw FormatError(source_name + ": unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t header_len = u8(6) | (u8(7) << 8) | (u8(8) << 16) | (u8(9) << 24);
  if (bytes.size() < 10 + static_cast<std::size_t>(header_len)) {
    throw FormatError(source_name + ": truncated checkpoint header");
  }
  Json header;
  try {
    header = Json::parse(bytes.substr(10, header_len));
  } catch (const Json::exception& e) {
    throw FormatError(source_name + ": bad checkpoint header: " + e.what());
  }
  const std::string_view payload = bytes.substr(10 + header_len);
  Checkpoint ckpt;
  try {
    if (header.at("format").get<std::string>() != "rovf-checkpoint") {
      throw FormatError(source_name + ": not a rovf checkpoint");
    }
    const std::size_t n_floats = header.at("payload_floats").get<std::size_t>();
    if (payload.size() != n_floats * 4) {
      throw FormatError(source_name + ": payload has " + std::to_string(payload.size()) +
                        " bytes, header declares " + std::to_string(n_floats * 4));
    }
    if (sha256_hex(payload) != header.at("payload_sha256").get<std::string>()) {
      throw FormatError(source_name + ": checkpoint checksum mismatch");
    }
    const RoVFConfig rcfg = rovf_config_from(header.at("rovf_config"));
    ckpt.encoder_config = encoder_config_from(header.at("encoder_config"));
    const Json& lin = header.at("lineage");
    ckpt.lineage.init_seed = lin.at("init_seed").get<std::uint64_t>();
    ckpt.lineage.train_seed = lin.at("train_seed").get<std::uint64_t>();
    ckpt.lineage.epochs_completed = lin.at("epochs_completed").get<int>();
    ckpt.lineage.steps_completed = lin.at("steps_completed").get<long>();

    ParameterSet rovf_params, encoder_params;
    for (const Json& b : header.at("blocks")) {
      const auto name = b.at("name").get<std::string>();
      const auto rows = b.at("shape").at(0).get<std::size_t>();
      const auto cols = b.at("shape").at(1).get<std::size_t>();
      const auto off = b.at("offset").get<std::size_t>();
      if (off + rows * cols > n_floats) {
        throw FormatError(source_name + ": block " + name + " exceeds the payload");
      }
      Matrix m(rows, cols);
      auto vals = m.values();
      for (std::size_t i = 0; i < vals.size(); ++i) {
        const std::size_t at = (off + i) * 4;
        const std::uint32_t bits = static_cast<std::uint32_t>(static_cast<unsigned char>(payload[at])) |
                                   (static_cast<std::uint32_t>(static_cast<unsigned char>(payload[at + 1])) << 8) |
                                   (static_cast<std::uint32_t>(static_cast<unsigned char>(payload[at + 2])) << 16) |
                                   (static_cast<std::uint32_t>(static_cast<unsigned char>(payload[at + 3])) << 24);
        vals[i] = std::bit_cast<float>(bits);
      }
      (name.rfind("encoder.", 0) == 0 ? encoder_params : rovf_params).add(name, std::move(m));
    }
    ckpt.model = RoVFModel::from_parameters(rcfg, ckpt.lineage.init_seed, std::move(rovf_params));
    if (ckpt.encoder_config.kind == encoders::EncoderKind::kToyPatch) {
      ckpt.encoder =
          encoders::ToyPatchEncoder::from_parameters(ckpt.encoder_config, std::move(encoder_params));
    } else if (encoder_params.size() != 0) {
      throw FormatError(source_name + ": precomputed encoder with stored encoder weights");
    }
  } catch (const Json::exception& e) {
    throw FormatError(source_name + ": malformed checkpoint header: " + e.what());
  } catch (const FormatError&) {
    throw;
  } catch (const ValidationError& e) {
    throw FormatError(source_name + ": " + e.what());
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(read_file(path), path.string());
}

}  // namespace rovf::model
