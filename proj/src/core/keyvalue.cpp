// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/core/keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rovf/core/error.hpp"

namespace rovf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues KeyValues::parse(std::istream& in, const std::string& source_name) {
  KeyValues kv;
  kv.source_ = source_name;
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(source_name, row, "expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ParseError(source_name, row, "empty key");
    if (kv.values_.count(key)) throw ParseError(source_name, row, "duplicate key '" + key + "'");
    kv.values_[key] = trim(t.substr(eq + 1));
  }
  return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  return parse(in, path.string());
}

std::optional<std::string> KeyValues::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  used_.insert(key);
  return it->second;
}

void KeyValues::read(const std::string& key, std::string& out) const {
  if (auto v = get(key)) out = *v;
}
void KeyValues::malformed(const std::string& key, const std::string& text) const {
  throw ValidationError(source_ + ": key '" + key + "' has malformed value '" + text + "'");
}

void KeyValues::read(const std::string& key, bool& out) const {
  auto v = get(key);
  if (!v) return;
  if (*v == "true" || *v == "1") {
    out = true;
  } else if (*v == "false" || *v == "0") {
    out = false;
  } else {
    throw ValidationError(source_ + ": key '" + key + "' expects true/false, got '" + *v + "'");
  }
}
void KeyValues::read(const std::string& key, std::vector<int>& out) const {
  auto v = get(key);
  if (!v) return;
  out.clear();
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_number<int>(key, item));
  }
}

std::vector<std::string> KeyValues::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (!used_.count(k)) out.push_back(k);
  }
  return out;
}

}  // namespace rovf
