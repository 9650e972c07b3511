#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spikedeig/montecarlo.hpp"

namespace spikedeig {

struct OutputOptions {
  bool write_Z = false;
  std::string format = "csv";  // csv | binary
};

struct MpOptions {
  double gamma = 1.0;
  std::vector<double> z;
};

struct IdentityOptions {
  double tol = 1e-6;
  std::size_t J = 30;
};

// One experiment file. Every section is optional; missing keys keep the
// defaults of the corresponding structs. See README.md for the schema.
struct ToolConfig {
  ExperimentConfig experiment;
  std::vector<std::string> spike_rules;  // as written, before evaluation at n
  std::string basis = "identity";        // identity | random | <matrix path>
  std::uint64_t basis_seed = 0;
  OutputOptions output;
  MpOptions mp;
  IdentityOptions identities;
  std::string source;  // file path, empty for in-memory text
};

// Parses YAML text. Unknown keys, wrong types and bad values throw
// Error(ConfigInvalid) naming the offending key; an unreadable basis file
// throws Error(Io).
ToolConfig parse_config(const std::string& text, const std::string& source = "");
ToolConfig load_config_file(const std::string& path);

}  // namespace spikedeig
