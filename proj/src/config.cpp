#include "spikedeig/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "spikedeig/errors.hpp"
#include "spikedeig/matrix_io.hpp"

namespace spikedeig {

namespace {

[[noreturn]] void invalid(const std::string& key, const std::string& why) {
  throw Error(Errc::ConfigInvalid, "key '" + key + "': " + why);
}

void check_keys(const YAML::Node& node, const std::string& prefix, const std::set<std::string>& allowed) {
  if (!node.IsMap()) invalid(prefix.empty() ? "<root>" : prefix, "expected a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) invalid(prefix.empty() ? key : prefix + "." + key, "unknown key");
  }
}

template <typename T>
T get(const YAML::Node& node, const std::string& key, const std::string& path) {
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    invalid(path + "." + key, "wrong type");
  }
}

template <typename T>
void maybe(const YAML::Node& node, const std::string& key, const std::string& path, T& out) {
  if (node[key]) out = get<T>(node, key, path);
}

std::size_t get_count(const YAML::Node& node, const std::string& key, const std::string& path) {
  const long long v = get<long long>(node, key, path);
  if (v < 0) invalid(path + "." + key, "must be non-negative");
  return static_cast<std::size_t>(v);
}

void maybe_count(const YAML::Node& node, const std::string& key, const std::string& path, std::size_t& out) {
  if (node[key]) out = get_count(node, key, path);
}

// Runs `f`, rewording library errors as ConfigInvalid for `key`.
template <typename F>
auto rekey(const std::string& key, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == Errc::Io) throw;
    invalid(key, e.what());
  }
}

std::string resolve_path(const std::string& p, const std::string& source) {
  namespace fs = std::filesystem;
  fs::path path(p);
  if (path.is_relative() && !source.empty()) path = fs::path(source).parent_path() / path;
  return path.string();
}

void parse_model(const YAML::Node& m, ToolConfig& cfg) {
  check_keys(m, "model", {"n", "N", "spikes", "law", "gamma_bound", "basis", "basis_seed"});
  auto& spec = cfg.experiment.spec;
  if (!m["n"]) invalid("model.n", "missing");
  if (!m["N"]) invalid("model.N", "missing");
  spec.n = get_count(m, "n", "model");
  spec.N = get_count(m, "N", "model");
  maybe(m, "gamma_bound", "model", spec.gamma_bound);
  if (m["law"]) {
    const auto text = get<std::string>(m, "law", "model");
    spec.law = rekey("model.law", [&] { return parse_entry_law(text); });
  }
  if (m["spikes"]) {
    const YAML::Node s = m["spikes"];
    if (!s.IsSequence()) invalid("model.spikes", "expected a list");
    spec.spikes.clear();
    cfg.spike_rules.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string key = "model.spikes[" + std::to_string(i) + "]";
      if (!s[i].IsScalar()) invalid(key, "expected a number or a rule string");
      const std::string text = s[i].as<std::string>();
      const SpikeRule rule = rekey(key, [&] { return parse_spike_rule(text); });
      cfg.spike_rules.push_back(text);
      spec.spikes.push_back(rule.evaluate(spec.n));
    }
  }
  maybe(m, "basis_seed", "model", cfg.basis_seed);
  maybe(m, "basis", "model", cfg.basis);
}

void build_basis(ToolConfig& cfg) {
  auto& spec = cfg.experiment.spec;
  if (cfg.basis == "identity") {
    spec.basis.reset();
  } else if (cfg.basis == "random") {
    if (spec.N == 0) invalid("model.N", "must be positive");
    spec.basis = random_orthogonal(spec.N, cfg.basis_seed);
  } else {
    Matrix u = read_matrix(resolve_path(cfg.basis, cfg.source));
    if (static_cast<std::size_t>(u.rows()) != spec.N || static_cast<std::size_t>(u.cols()) != spec.N)
      invalid("model.basis", "matrix must be N x N");
    spec.basis = std::move(u);
  }
}

void parse_experiment(const YAML::Node& e, ToolConfig& cfg) {
  check_keys(e, "experiment",
             {"statistic", "nu", "replicates", "master_seed", "x_mode", "empirical", "delta0", "eps0",
              "coefficient_bound", "threads", "reference_draws"});
  auto& x = cfg.experiment;
  if (e["statistic"]) {
    const auto text = get<std::string>(e, "statistic", "experiment");
    x.statistic = rekey("experiment.statistic", [&] { return parse_statistic(text); });
  }
  maybe_count(e, "nu", "experiment", x.nu);
  maybe_count(e, "replicates", "experiment", x.replicates);
  maybe(e, "master_seed", "experiment", x.master_seed);
  if (e["x_mode"]) {
    const auto text = get<std::string>(e, "x_mode", "experiment");
    x.x_mode = rekey("experiment.x_mode", [&] { return parse_x_mode(text); });
  }
  maybe(e, "empirical", "experiment", x.empirical);
  maybe(e, "delta0", "experiment", x.delta0);
  maybe(e, "eps0", "experiment", x.eps0);
  maybe(e, "coefficient_bound", "experiment", x.coefficient_bound);
  maybe_count(e, "threads", "experiment", x.threads);
  maybe_count(e, "reference_draws", "experiment", x.reference_draws);
}

void parse_concentration(const YAML::Node& c, ToolConfig& cfg) {
  check_keys(c, "concentration", {"p", "q", "t", "C", "matrix", "t_grid"});
  auto& cp = cfg.experiment.concentration;
  maybe_count(c, "p", "concentration", cp.p);
  maybe_count(c, "q", "concentration", cp.q);
  maybe(c, "t", "concentration", cp.t);
  maybe(c, "C", "concentration", cp.C);
  maybe(c, "matrix", "concentration", cp.matrix);
  if (cp.matrix != "identity" && cp.matrix != "zero") cp.matrix = resolve_path(cp.matrix, cfg.source);
  maybe(c, "t_grid", "concentration", cp.t_grid);
}

void parse_output(const YAML::Node& o, ToolConfig& cfg) {
  check_keys(o, "output", {"write_Z", "format"});
  maybe(o, "write_Z", "output", cfg.output.write_Z);
  maybe(o, "format", "output", cfg.output.format);
  if (cfg.output.format != "csv" && cfg.output.format != "binary") invalid("output.format", "expected csv or binary");
}

void parse_mp(const YAML::Node& m, ToolConfig& cfg) {
  check_keys(m, "mp", {"gamma", "z", "from", "to", "points"});
  maybe(m, "gamma", "mp", cfg.mp.gamma);
  if (m["z"] && (m["from"] || m["to"] || m["points"])) invalid("mp.z", "give either z or from/to/points");
  if (m["z"]) {
    cfg.mp.z = get<std::vector<double>>(m, "z", "mp");
  } else if (m["from"] || m["to"] || m["points"]) {
    if (!m["from"] || !m["to"] || !m["points"]) invalid("mp.points", "from, to and points go together");
    const double from = get<double>(m, "from", "mp");
    const double to = get<double>(m, "to", "mp");
    const std::size_t points = get_count(m, "points", "mp");
    if (points < 1) invalid("mp.points", "must be at least 1");
    cfg.mp.z.clear();
    for (std::size_t i = 0; i < points; ++i)
      cfg.mp.z.push_back(points == 1 ? from : from + (to - from) * static_cast<double>(i) / (points - 1));
  }
}

void parse_identities(const YAML::Node& m, ToolConfig& cfg) {
  check_keys(m, "identities", {"tol", "J"});
  maybe(m, "tol", "identities", cfg.identities.tol);
  maybe_count(m, "J", "identities", cfg.identities.J);
  if (!(cfg.identities.tol >= 0.0)) invalid("identities.tol", "must be non-negative");
}

}  // namespace

ToolConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(Errc::ConfigInvalid, std::string("malformed YAML: ") + e.what());
  }
  ToolConfig cfg;
  cfg.source = source;
  if (root.IsNull()) return cfg;
  check_keys(root, "", {"model", "experiment", "concentration", "output", "mp", "identities"});
  if (root["model"]) parse_model(root["model"], cfg);
  if (root["experiment"]) parse_experiment(root["experiment"], cfg);
  if (root["concentration"]) parse_concentration(root["concentration"], cfg);
  if (root["output"]) parse_output(root["output"], cfg);
  if (root["mp"]) parse_mp(root["mp"], cfg);
  if (root["identities"]) parse_identities(root["identities"], cfg);
  if (root["model"]) build_basis(cfg);
  return cfg;
}

ToolConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::Io, "cannot open config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace spikedeig
