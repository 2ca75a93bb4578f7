#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

namespace fsns {

std::string sha256_hex(const std::string& bytes);
std::string file_sha256(const std::filesystem::path& path);

/// Record of one CLI run. Written last and atomically; a directory whose
/// manifest says complete = true holds a finished run.
struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string version;
  std::string started_utc;
  std::string finished_utc;
  double wall_seconds = 0.0;
  bool complete = false;
  int exit_code = 0;
  std::string note;
  std::map<std::string, std::string> files;  // relative path -> sha256
  nlohmann::json extra = nlohmann::json::object();
};

inline constexpr const char* kManifestName = "manifest.json";

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Checksums every regular file under `dir` except the manifest itself.
std::map<std::string, std::string> checksum_tree(const std::filesystem::path& dir);

/// Writes to a temporary file in `dir` and renames it over manifest.json.
void write_manifest(const std::filesystem::path& dir, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& dir);

/// Writes `bytes` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

std::string utc_timestamp();

}  // namespace fsns
