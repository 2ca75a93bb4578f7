#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fsns {

/// Flat key-value run configuration.
///
/// Grammar (one entry per line):
///
///   line    := blank | comment | entry
///   comment := '#' any*
///   entry   := key ws* '=' ws* value [ws* '#' any*]
///   key     := section '.' name      (letters, digits, '_', at least one '.')
///
/// Values are taken verbatim after trimming; a value may not contain '#'.
/// Keys are unique. Serialization writes "key = value" lines sorted by key,
/// so parse(serialize(c)) == c.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::filesystem::path& path);

  std::string serialize() const;

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  void set(const std::string& key, const std::string& value);
  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// Typed accessors; the `require_*` forms throw ConfigError naming the key
  /// when it is missing, the others fall back to `def`.
  std::string require_string(const std::string& key) const;
  double require_double(const std::string& key) const;
  long long require_int(const std::string& key) const;
  std::uint64_t require_u64(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  long long get_int(const std::string& key, long long def) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::vector<double> get_double_list(const std::string& key, const std::vector<double>& def) const;
  std::vector<std::string> get_string_list(const std::string& key, const std::vector<std::string>& def) const;

  /// Throws ConfigError for any key outside `known`.
  void reject_unknown(const std::set<std::string>& known) const;

  friend bool operator==(const Config&, const Config&) = default;

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace fsns
