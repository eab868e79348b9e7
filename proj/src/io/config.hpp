#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "mlpnp/errors.hpp"

namespace mlpnp::io {

// Flat key=value configuration. '#' starts a comment. Typed getters track
// which keys were consumed so unknown keys can be rejected afterwards.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  // Throws ConfigError when the file contains a key no getter asked for.
  void reject_unknown_keys() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> consumed_;
};

}  // namespace mlpnp::io
