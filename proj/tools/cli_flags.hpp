#pragma once

// Flag handling for the dll tool: `--key value` or `--key=value` pairs plus an
// optional `--config file` holding one key=value pair per line (# comments).
// Flags always override config-file entries.

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dll/errors.hpp"

namespace dll::cli {

struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

class FlagSet {
 public:
  FlagSet(int argc, char** argv, int first) {
    std::map<std::string, std::string> from_flags;
    for (int i = first; i < argc; ++i) {
      std::string tok = argv[i];
      if (tok.rfind("--", 0) != 0 || tok.size() <= 2)
        throw UsageError("expected --flag, got '" + tok + "'");
      tok = tok.substr(2);
      std::string key, value;
      const auto eq = tok.find('=');
      if (eq != std::string::npos) {
        key = tok.substr(0, eq);
        value = tok.substr(eq + 1);
      } else {
        key = tok;
        if (i + 1 >= argc) throw UsageError("flag --" + key + " needs a value");
        value = argv[++i];
      }
      from_flags[key] = value;
    }
    const auto cfg = from_flags.find("config");
    if (cfg != from_flags.end()) {
      load_config(cfg->second);
      from_flags.erase("config");
    }
    for (auto& [k, v] : from_flags) values_[k] = v;  // flags win
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_str(const std::string& key, const std::string& def) const {
    const auto it = values_.find(key);
    return it == values_.end() ? def : it->second;
  }

  std::string require_str(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw UsageError("missing required flag --" + key);
    return it->second;
  }

  double get_double(const std::string& key, double def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    return parse_double(key, it->second);
  }

  uint64_t get_u64(const std::string& key, uint64_t def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    return parse_u64(key, it->second);
  }

  long get_long(const std::string& key, long def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    long v = 0;
    const auto& s = it->second;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw UsageError("flag --" + key + ": bad integer '" + s + "'");
    return v;
  }

  std::vector<std::string> get_list(const std::string& key, const std::string& def) const {
    std::vector<std::string> out;
    std::stringstream ss(get_str(key, def));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) out.push_back(item);
    }
    if (out.empty()) throw UsageError("flag --" + key + ": empty list");
    return out;
  }

  // Every provided key must be known to the command.
  void check_allowed(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : values_) {
      if (allowed.count(k) == 0) throw UsageError("unknown flag --" + k);
    }
  }

 private:
  static double parse_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw UsageError("flag --" + key + ": bad number '" + s + "'");
    return v;
  }

  static uint64_t parse_u64(const std::string& key, const std::string& s) {
    uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw UsageError("flag --" + key + ": bad integer '" + s + "'");
    return v;
  }

  void load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file '" + path + "'");
    std::string line;
    while (std::getline(f, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      // trim
      const auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      const auto e = line.find_last_not_of(" \t\r");
      line = line.substr(b, e - b + 1);
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw UsageError("config line without '=': " + line);
      auto trim = [](std::string s) {
        const auto b2 = s.find_first_not_of(" \t");
        const auto e2 = s.find_last_not_of(" \t");
        return b2 == std::string::npos ? std::string() : s.substr(b2, e2 - b2 + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw UsageError("config line with empty key: " + line);
      values_[key] = value;
    }
  }

  std::map<std::string, std::string> values_;
};

}  // namespace dll::cli
