#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "skg/errors.hpp"

namespace skg {

// Plain-text configuration: one `key = value` pair per line, `#` starts a
// comment, blank lines are ignored.  Keys are dotted lowercase paths
// (e.g. `filter.r`); list values are comma separated.  Unknown keys are
// rejected after parsing so typos surface instead of silently using a
// default.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const std::size_t eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) +
                          " is not 'key = value': '" + trimmed + "'");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw ConfigError("config line " + std::to_string(lineno) +
                          " has an empty key");
      if (cfg.values_.count(key))
        throw ConfigError("config key '" + key + "' appears more than once");
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static KeyValueConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str());
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key,
                         const std::string& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    used_.insert(key);
    return it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    used_.insert(key);
    return parse_double(key, it->second);
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    used_.insert(key);
    std::uint64_t v = 0;
    const auto [p, ec] =
        std::from_chars(it->second.data(),
                        it->second.data() + it->second.size(), v);
    if (ec != std::errc{} || p != it->second.data() + it->second.size())
      throw ConfigError("config key '" + key +
                        "' must be a non-negative integer, got '" +
                        it->second + "'");
    return v;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    used_.insert(key);
    if (it->second == "true" || it->second == "1" || it->second == "yes")
      return true;
    if (it->second == "false" || it->second == "0" || it->second == "no")
      return false;
    throw ConfigError("config key '" + key + "' must be a boolean, got '" +
                      it->second + "'");
  }

  std::vector<double> get_double_list(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return {};
    used_.insert(key);
    std::vector<double> out;
    std::istringstream in(it->second);
    std::string item;
    while (std::getline(in, item, ',')) {
      const std::string t = trim(item);
      if (t.empty())
        throw ConfigError("config key '" + key + "' has an empty list item");
      out.push_back(parse_double(key, t));
    }
    if (out.empty())
      throw ConfigError("config key '" + key + "' has an empty list");
    return out;
  }

  std::vector<std::string> get_string_list(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return {};
    used_.insert(key);
    std::vector<std::string> out;
    std::istringstream in(it->second);
    std::string item;
    while (std::getline(in, item, ',')) {
      const std::string t = trim(item);
      if (t.empty())
        throw ConfigError("config key '" + key + "' has an empty list item");
      out.push_back(t);
    }
    return out;
  }

  // Everything that was parsed but never consumed by a getter; callers
  // reject these after building their typed config.
  std::vector<std::string> unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [key, value] : values_) {
      if (!used_.count(key)) out.push_back(key);
    }
    return out;
  }

  void reject_unused() const {
    const auto stray = unused_keys();
    if (!stray.empty()) {
      std::string msg = "unknown config key(s):";
      for (const auto& k : stray) msg += " '" + k + "'";
      throw ConfigError(msg);
    }
  }

  // Canonical text form (sorted keys) used for provenance hashing.
  std::string canonical() const {
    std::string out;
    for (const auto& [key, value] : values_) {
      out += key;
      out += " = ";
      out += value;
      out += '\n';
    }
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }

  static double parse_double(const std::string& key, const std::string& text) {
    if (text == "inf" || text == "+inf")
      return std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [p, ec] =
        std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
      throw ConfigError("config key '" + key + "' must be a number, got '" +
                        text + "'");
    return v;
  }

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace skg
