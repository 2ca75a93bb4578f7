#include "fsns/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "fsns/errors.hpp"

namespace fsns {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.' || key.find('.') == std::string::npos) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
  }
  return key.find("..") == std::string::npos;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "' (expected section.name)");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    if (c.has(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    c.entries_[key] = value;
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::string Config::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("invalid key '" + key + "'");
  const std::string v = trim(value);
  if (v.empty() || v.find('#') != std::string::npos || v.find('\n') != std::string::npos) {
    throw ConfigError("invalid value for '" + key + "'");
  }
  entries_[key] = v;
}

std::string Config::require_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing required config key '" + key + "'");
  return it->second;
}

double Config::require_double(const std::string& key) const { return to_double(key, require_string(key)); }
long long Config::require_int(const std::string& key) const { return to_int(key, require_string(key)); }
std::uint64_t Config::require_u64(const std::string& key) const { return to_u64(key, require_string(key)); }

std::string Config::get_string(const std::string& key, const std::string& def) const {
  return has(key) ? entries_.at(key) : def;
}

double Config::get_double(const std::string& key, double def) const {
  return has(key) ? to_double(key, entries_.at(key)) : def;
}

long long Config::get_int(const std::string& key, long long def) const {
  return has(key) ? to_int(key, entries_.at(key)) : def;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t def) const {
  return has(key) ? to_u64(key, entries_.at(key)) : def;
}

bool Config::get_bool(const std::string& key, bool def) const {
  if (!has(key)) return def;
  const auto& v = entries_.at(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<double> Config::get_double_list(const std::string& key, const std::vector<double>& def) const {
  if (!has(key)) return def;
  std::vector<double> out;
  for (const auto& tok : split_list(entries_.at(key))) out.push_back(to_double(key, tok));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

std::vector<std::string> Config::get_string_list(const std::string& key,
                                                 const std::vector<std::string>& def) const {
  if (!has(key)) return def;
  auto out = split_list(entries_.at(key));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

void Config::reject_unknown(const std::set<std::string>& known) const {
  for (const auto& [k, v] : entries_) {
    if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
  }
}

}  // namespace fsns
