// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

namespace rovf {

/// Flat `key = value` text. Blank lines and lines starting with '#' are
/// skipped. Each consumer reads the keys it knows; `unused()` lists the rest
/// so callers can reject typos.
class KeyValues {
 public:
  KeyValues() = default;
  static KeyValues parse(std::istream& in, const std::string& source_name);
  static KeyValues load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool contains(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> get(const std::string& key) const;
  // Typed readers leave `out` untouched when the key is absent and throw
  // ValidationError naming the key on malformed values.
  void read(const std::string& key, std::string& out) const;
  template <typename T>
    requires(std::is_arithmetic_v<T> && !std::is_same_v<T, bool>)
  void read(const std::string& key, T& out) const {
    if (auto v = get(key)) out = parse_number<T>(key, *v);
  }
  void read(const std::string& key, bool& out) const;
  void read(const std::string& key, std::vector<int>& out) const;

  std::vector<std::string> unused() const;
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  template <typename T>
  T parse_number(const std::string& key, const std::string& text) const {
    T v{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end) malformed(key, text);
    return v;
  }
  [[noreturn]] void malformed(const std::string& key, const std::string& text) const;

  std::map<std::string, std::string> values_;
  std::string source_ = "config";
  mutable std::set<std::string> used_;
};

}  // namespace rovf
