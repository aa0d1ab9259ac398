// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#include "rlife/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "rlife/dataset.hpp"
#include "rlife/error.hpp"

namespace rlife {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

template <typename Int>
Int parse_integer(std::string_view key, const std::string& text) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DomainError("config: key '" + std::string(key) + "' expects an integer, got '" + text + "'");
  }
  return value;
}

}  // namespace

KeyValues KeyValues::parse(std::istream& in, const std::string& source) {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (csv::read_line(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, lineno, "expected key=value");
    const auto key = trim(t.substr(0, eq));
    if (key.empty()) throw ParseError(source, lineno, "empty key");
    kv.values_[std::string(key)] = std::string(trim(t.substr(eq + 1)));
  }
  return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file " + path.string());
  return parse(in, path.string());
}

const std::string* KeyValues::find(std::string_view key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

double KeyValues::get_double(std::string_view key, double fallback) const {
  const auto* v = find(key);
  return v ? csv::parse_number(*v, "config", 0, key) : fallback;
}

std::int64_t KeyValues::get_int(std::string_view key, std::int64_t fallback) const {
  const auto* v = find(key);
  return v ? parse_integer<std::int64_t>(key, *v) : fallback;
}

std::uint64_t KeyValues::get_uint(std::string_view key, std::uint64_t fallback) const {
  const auto* v = find(key);
  return v ? parse_integer<std::uint64_t>(key, *v) : fallback;
}

bool KeyValues::get_bool(std::string_view key, bool fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1") return true;
  if (*v == "false" || *v == "0") return false;
  throw DomainError("config: key '" + std::string(key) + "' expects true/false, got '" + *v + "'");
}

std::string KeyValues::get_string(std::string_view key, std::string fallback) const {
  const auto* v = find(key);
  return v ? *v : fallback;
}

std::vector<std::string> KeyValues::get_strings(std::string_view key,
                                                std::vector<std::string> fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::vector<std::string> out;
  for (auto field : csv::split(*v)) {
    field = trim(field);
    if (!field.empty()) out.emplace_back(field);
  }
  return out;
}

std::vector<double> KeyValues::get_doubles(std::string_view key, std::vector<double> fallback) const {
  if (!find(key)) return fallback;
  std::vector<double> out;
  for (const auto& s : get_strings(key, {})) out.push_back(csv::parse_number(s, "config", 0, key));
  return out;
}

void KeyValues::require_known(const std::set<std::string, std::less<>>& known) const {
  for (const auto& [key, value] : values_) {
    if (!known.count(key)) throw DomainError("config: unknown key '" + key + "'");
  }
}

void KeyValues::write(std::ostream& out) const {
  for (const auto& [key, value] : values_) out << key << '=' << value << '\n';
}

}  // namespace rlife
