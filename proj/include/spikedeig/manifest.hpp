#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spikedeig/report.hpp"

namespace spikedeig {

struct ManifestEntry {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

// Written last as manifest.json. Output files are hashed; the manifest itself
// carries wall-clock timestamps and so is not byte-reproducible.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::string output_dir;
  std::string version = SPIKEDEIG_VERSION;
  std::uint64_t master_seed = 0;
  std::string started;   // UTC, ISO 8601
  std::string finished;
  std::vector<ManifestEntry> files;

  // Hashes `relative_path` under output_dir and appends it.
  void add_file(const std::string& relative_path);
  Json to_json() const;
  void write() const;  // output_dir/manifest.json
};

// Lower-case hex SHA-256 of a file's bytes. Throws Error(Io).
std::string sha256_file(const std::string& path);

std::string utc_timestamp();

}  // namespace spikedeig
