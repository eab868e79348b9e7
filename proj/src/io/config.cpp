#include "io/config.hpp"

#include <fstream>
#include <sstream>

#include "io/text.hpp"

namespace mlpnp::io {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::config_error,
                  "line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw Error(ErrorCode::config_error, "line " + std::to_string(line_no) + ": empty key");
    cfg.values_[key] = value;
  }
  return cfg;
}

double Config::get_double(const std::string& key, double fallback) const {
  consumed_.insert(key);
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  double v = 0.0;
  if (!parse_double(it->second, v))
    throw Error(ErrorCode::config_error, "key '" + key + "': bad number '" + it->second + "'");
  return v;
}

int Config::get_int(const std::string& key, int fallback) const {
  const double v = get_double(key, static_cast<double>(fallback));
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw Error(ErrorCode::config_error, "key '" + key + "': expected an integer");
  return i;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  consumed_.insert(key);
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw Error(ErrorCode::config_error, "key '" + key + "': bad unsigned '" + it->second + "'");
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  consumed_.insert(key);
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw Error(ErrorCode::config_error, "key '" + key + "': expected true/false");
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  consumed_.insert(key);
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

void Config::reject_unknown_keys() const {
  for (const auto& [key, value] : values_)
    if (consumed_.count(key) == 0)
      throw Error(ErrorCode::config_error, "unknown key '" + key + "'");
}

}  // namespace mlpnp::io
