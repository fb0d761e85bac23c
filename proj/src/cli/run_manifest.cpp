// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/cli/run_manifest.hpp"

#include <json.hpp>

#include "rovf/core/digest.hpp"
#include "rovf/core/error.hpp"

namespace rovf::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string relative_to(const fs::path& file, const fs::path& base_dir) {
  return fs::absolute(file).lexically_normal().lexically_relative(
                                                  fs::absolute(base_dir).lexically_normal())
      .generic_string();
}

}  // namespace

void RunManifest::write(const fs::path& path) const {
  const fs::path base = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  Json j;
  j["command"] = command;
  j["config"] = config;
  j["seeds"] = seeds;
  Json in = Json::array();
  for (const auto& p : inputs) {
    in.push_back({{"path", relative_to(p, base)}, {"git_blob_sha1", git_blob_sha1(read_file(p))}});
  }
  Json out = Json::array();
  for (const auto& p : outputs) {
    out.push_back({{"path", relative_to(p, base)}, {"sha256", sha256_hex(read_file(p))}});
  }
  j["inputs"] = std::move(in);
  j["outputs"] = std::move(out);
  j["wall_seconds"] = wall_seconds;
  write_file(path, j.dump(1) + "\n");
}

void verify_recorded_checksum(const fs::path& file) {
  const fs::path dir = file.parent_path().empty() ? fs::path(".") : file.parent_path();
  std::vector<fs::path> records;
  if (fs::exists(fs::path(file.string() + ".run.json"))) records.emplace_back(file.string() + ".run.json");
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("run_", 0) == 0 && entry.path().extension() == ".json") {
        records.push_back(entry.path());
      }
    }
  }
  const std::string target = fs::absolute(file).lexically_normal().generic_string();
  for (const fs::path& rec : records) {
    Json j;
    try {
      j = Json::parse(read_file(rec));
    } catch (const Json::exception&) {
      continue;  // not one of ours
    }
    if (!j.contains("outputs")) continue;
    for (const Json& o : j["outputs"]) {
      const fs::path listed = rec.parent_path() / o.value("path", "");
      if (fs::absolute(listed).lexically_normal().generic_string() != target) continue;
      const std::string actual = sha256_hex(read_file(file));
      if (actual != o.value("sha256", "")) {
        throw FormatError(file.string() + ": checksum mismatch against " + rec.string());
      }
    }
  }
}

}  // namespace rovf::cli
