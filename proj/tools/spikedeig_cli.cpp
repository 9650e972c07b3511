// Batch front end: every subcommand reads one YAML config, applies flag
// overrides, writes its artifacts under --out and finishes with manifest.json.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spikedeig/block.hpp"
#include "spikedeig/centering.hpp"
#include "spikedeig/config.hpp"
#include "spikedeig/errors.hpp"
#include "spikedeig/manifest.hpp"
#include "spikedeig/matrix_io.hpp"
#include "spikedeig/montecarlo.hpp"
#include "spikedeig/mp.hpp"
#include "spikedeig/report.hpp"
#include "spikedeig/rng.hpp"
#include "spikedeig/spectral.hpp"

namespace fs = std::filesystem;
using namespace spikedeig;

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kNumeric = 3, kTolerance = 4, kIo = 5 };

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  std::optional<std::string> mode;
  std::optional<std::string> x_mode;
  bool empirical = false;
  std::optional<std::size_t> threads;
  std::optional<double> tol;
  // mp only
  std::optional<double> gamma;
  std::vector<double> z;
  std::optional<double> z_from, z_to;
  std::optional<std::size_t> points;
};

ToolConfig load(const Options& o) {
  ToolConfig cfg = o.config.empty() ? parse_config("") : load_config_file(o.config);
  auto& x = cfg.experiment;
  if (o.seed) x.master_seed = *o.seed;
  if (o.replicates) x.replicates = *o.replicates;
  if (o.x_mode) x.x_mode = parse_x_mode(*o.x_mode);
  if (o.empirical) x.empirical = true;
  if (o.threads) {
    x.threads = *o.threads;
  } else if (const char* env = std::getenv("SPIKED_EIG_THREADS"); env && *env) {
    try {
      x.threads = std::stoul(env);
    } catch (const std::exception&) {
      throw Error(Errc::ConfigInvalid, "SPIKED_EIG_THREADS must be a non-negative integer");
    }
  }
  if (o.tol) cfg.identities.tol = *o.tol;
  return cfg;
}

RunManifest start(const std::string& command, const Options& o, const ToolConfig& cfg) {
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw Error(Errc::Io, "cannot create output directory " + o.out);
  RunManifest m;
  m.command = command;
  m.config_path = o.config;
  m.output_dir = o.out;
  m.master_seed = cfg.experiment.master_seed;
  m.started = utc_timestamp();
  return m;
}

void finish(RunManifest& m) {
  m.finished = utc_timestamp();
  m.write();
}

std::string out_path(const Options& o, const std::string& name) { return (fs::path(o.out) / name).string(); }

Json record_context(const ExperimentConfig& x, const std::string& variant) {
  return Json{{"variant", variant}, {"nu", x.nu}, {"n", x.spec.n}, {"N", x.spec.N}, {"M", x.spec.M()}};
}

StatisticKind pick_statistic(const std::optional<std::string>& mode, StatisticKind configured,
                             const std::string& prefix, bool (*family)(StatisticKind), StatisticKind fallback) {
  if (mode) return parse_statistic(prefix + *mode);
  return family(configured) ? configured : fallback;
}

bool is_concentration(StatisticKind k) {
  return k == StatisticKind::ConcentrationSm || k == StatisticKind::ConcentrationHw;
}

void write_experiment(const Options& o, const ToolConfig& cfg, const ExperimentReport& rep, RunManifest& m) {
  write_json(out_path(o, "report.json"), to_json(rep));
  write_records_jsonl(out_path(o, "records.jsonl"), rep.records,
                      record_context(cfg.experiment, rep.mode.empty() ? to_string(rep.statistic) : rep.mode));
  write_samples_csv(out_path(o, "samples.csv"), rep.records);
  m.add_file("report.json");
  m.add_file("records.jsonl");
  m.add_file("samples.csv");
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_generate(const Options& o) {
  ToolConfig cfg = load(o);
  cfg.experiment.spec.validate();
  RunManifest m = start("generate", o, cfg);
  const DataSample d = generate_data(cfg.experiment.spec, rng::derive_seed(cfg.experiment.master_seed, 0));
  const bool binary = cfg.output.format == "binary";
  const std::string ext = binary ? ".bin" : ".csv";
  auto write = [&](const std::string& name, const Matrix& a) {
    if (binary) {
      write_matrix_binary(out_path(o, name + ext), a);
    } else {
      write_matrix_csv(out_path(o, name + ext), a);
    }
    m.add_file(name + ext);
  };
  write("X", d.X);
  if (cfg.output.write_Z) write("Z", d.Z);
  finish(m);
  std::cout << "wrote X" << (cfg.output.write_Z ? " and Z" : "") << " (" << d.X.rows() << " x " << d.X.cols()
            << ") to " << o.out << '\n';
  return kOk;
}

int cmd_eigs(const Options& o) {
  ToolConfig cfg = load(o);
  const auto& spec = cfg.experiment.spec;
  spec.validate();
  RunManifest m = start("eigs", o, cfg);
  const DataSample d = generate_data(spec, rng::derive_seed(cfg.experiment.master_seed, 0));
  const EigenSystem eig = sym_eigen(sample_covariance(d.X));
  {
    std::ofstream os(out_path(o, "eigenvalues.csv"));
    os << "k,l_hat\n";
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) os << k + 1 << ',' << Json(eig.values(k)).dump() << '\n';
    if (!os) throw Error(Errc::Io, "write failed for eigenvalues.csv");
  }
  Json spikes = Json::array();
  for (std::size_t k = 1; k <= spec.M(); ++k) {
    Json row{{"k", k}, {"l", spec.spikes[k - 1]}, {"l_hat", eig.values(k - 1)}};
    try {
      const Alignment al = alignment(eig, spec.basis, spec.M(), k);
      row["inner_sq"] = al.inner * al.inner;
      row["one_minus_inner_sq"] = al.one_minus_inner_sq;
      row["R"] = al.R;
    } catch (const Error& e) {
      if (!is_numeric_precondition(e.code())) throw;
      row["flag"] = errc_name(e.code());
    }
    spikes.push_back(row);
  }
  write_json(out_path(o, "spikes.json"), Json{{"n", spec.n}, {"N", spec.N}, {"M", spec.M()}, {"spikes", spikes}});
  m.add_file("eigenvalues.csv");
  m.add_file("spikes.json");
  finish(m);
  std::cout << "top eigenvalue " << eig.values(0) << '\n';
  return kOk;
}

int cmd_clt(const Options& o) {
  ToolConfig cfg = load(o);
  auto& x = cfg.experiment;
  x.statistic = pick_statistic(o.mode, x.statistic, "clt_", is_clt, StatisticKind::CltOracle);
  x.validate();
  RunManifest m = start("clt", o, cfg);
  const ExperimentReport rep = run_experiment(x);
  write_experiment(o, cfg, rep, m);
  const XMode xm = x.effective_x_mode();
  if (x.statistic != StatisticKind::CltStatistical && xm.kind != XMode::Kind::Zero) {
    const PolynomialCoefficients pc = polynomial_coefficients(x.spec.spikes, x.nu, x.spec.n);
    Json j = to_json(pc);
    if (xm.kind == XMode::Kind::Root) j["root"] = to_json(solve_x(pc));
    write_json(out_path(o, "coefficients.json"), j);
    m.add_file("coefficients.json");
  }
  finish(m);
  std::cout << to_string(rep.statistic) << ": ks_normal=" << rep.ks_normal << " mean=" << rep.mean
            << " variance=" << rep.variance << " flagged=" << rep.flagged << '\n';
  return kOk;
}

int cmd_eigvec(const Options& o) {
  ToolConfig cfg = load(o);
  auto& x = cfg.experiment;
  x.statistic = pick_statistic(o.mode, x.statistic, "eigvec_", is_eigvec, StatisticKind::EigvecA);
  x.validate();
  RunManifest m = start("eigvec", o, cfg);
  const ExperimentReport rep = run_experiment(x);
  write_experiment(o, cfg, rep, m);
  finish(m);
  std::cout << to_string(rep.statistic) << ": median=" << rep.median << " mean=" << rep.mean;
  if (rep.ks_reference) std::cout << " ks_reference=" << *rep.ks_reference;
  std::cout << " flagged=" << rep.flagged << '\n';
  return kOk;
}

int cmd_consistency(const Options& o) {
  ToolConfig cfg = load(o);
  auto& x = cfg.experiment;
  x.statistic = StatisticKind::Consistency;
  x.validate();
  RunManifest m = start("consistency", o, cfg);
  const ConsistencyReport rep = consistency_report(x);
  write_json(out_path(o, "report.json"), to_json(rep));
  write_records_jsonl(out_path(o, "records.jsonl"), rep.records, record_context(x, "consistency"));
  m.add_file("report.json");
  m.add_file("records.jsonl");
  finish(m);
  for (std::size_t k = 0; k < rep.median_inner_sq.size(); ++k)
    std::cout << "nu=" << k + 1 << " median_inner_sq=" << rep.median_inner_sq[k]
              << " median_ratio_error=" << rep.median_ratio_error[k] << '\n';
  return kOk;
}

int cmd_concentration(const Options& o) {
  ToolConfig cfg = load(o);
  auto& x = cfg.experiment;
  x.statistic = pick_statistic(o.mode, x.statistic, "concentration_", is_concentration,
                               StatisticKind::ConcentrationSm);
  x.validate();
  RunManifest m = start("concentration", o, cfg);
  const ExperimentReport rep = run_experiment(x);
  write_experiment(o, cfg, rep, m);
  finish(m);
  if (rep.sm) std::cout << "sm: violations=" << rep.sm->violations << " of " << rep.sm->reps << '\n';
  if (rep.hw)
    std::cout << "hw: fitted_c_quadratic=" << rep.hw->fitted_c_quadratic
              << " fitted_c_bilinear=" << rep.hw->fitted_c_bilinear << '\n';
  return kOk;
}

int cmd_mp(const Options& o) {
  ToolConfig cfg = load(o);
  double gamma = o.gamma ? *o.gamma : cfg.mp.gamma;
  std::vector<double> grid = cfg.mp.z;
  if (!o.z.empty()) grid = o.z;
  if (o.z_from || o.z_to || o.points) {
    if (!o.z_from || !o.z_to || !o.points || *o.points < 1)
      throw Error(Errc::ConfigInvalid, "--z-from, --z-to and --points go together");
    grid.clear();
    for (std::size_t i = 0; i < *o.points; ++i)
      grid.push_back(*o.points == 1 ? *o.z_from
                                    : *o.z_from + (*o.z_to - *o.z_from) * static_cast<double>(i) / (*o.points - 1));
  }
  if (!(gamma > 0.0)) throw Error(Errc::ConfigInvalid, "mp.gamma must be positive");
  if (grid.empty()) throw Error(Errc::ConfigInvalid, "mp.z grid is empty");
  RunManifest m = start("mp", o, cfg);
  std::ofstream os(out_path(o, "mp.csv"));
  os << "z,m,residual,error\n";
  std::size_t bad = 0;
  for (double z : grid) {
    os << Json(z).dump() << ',';
    try {
      const double v = mp_stieltjes(z, gamma);
      os << Json(v).dump() << ',' << Json(std::abs(mp_quadratic_residual(z, gamma, v))).dump() << ",\n";
    } catch (const Error& e) {
      if (!is_numeric_precondition(e.code())) throw;
      os << ",," << errc_name(e.code()) << '\n';
      ++bad;
    }
  }
  os.close();
  if (!os) throw Error(Errc::Io, "write failed for mp.csv");
  m.add_file("mp.csv");
  finish(m);
  std::cout << grid.size() << " rows, " << bad << " inside the bulk\n";
  return kOk;
}

// A check passes when its residual is strictly below the tolerance, so
// --tol 0 always fails.
int cmd_check_identities(const Options& o) {
  ToolConfig cfg = load(o);
  const auto& x = cfg.experiment;
  const auto& spec = x.spec;
  spec.validate();
  if (spec.M() < 1) throw Error(Errc::ConfigInvalid, "model.spikes must hold at least one spike");
  if (x.nu < 1 || x.nu > spec.M()) throw Error(Errc::ConfigInvalid, "experiment.nu must lie in 1..M");
  const double tol = cfg.identities.tol;
  RunManifest m = start("check-identities", o, cfg);
  const DataSample d = generate_data(spec, rng::derive_seed(x.master_seed, 0));
  const Matrix S = sample_covariance(d.X);
  const EigenSystem eig = sym_eigen(S);
  const BlockDecomposition bd = block_decompose(d.Z, spec.spikes);

  bool pass = true;
  Json checks = Json::array();
  auto check = [&](const std::string& name, double residual, double bound) {
    const bool ok = residual < bound;
    pass = pass && ok;
    checks.push_back(Json{{"name", name}, {"residual", residual}, {"bound", bound}, {"pass", ok}});
  };
  check("orthonormality", orthonormality_residual(eig.vectors, spec.N), tol);
  for (std::size_t nu = 1; nu <= spec.M(); ++nu) {
    const Alignment al = alignment(eig, spec.basis, spec.M(), nu);
    const MasterResiduals r = verify_master_identities(bd, al);
    const std::string tag = "[nu=" + std::to_string(nu) + "]";
    check("eigen_equation" + tag, r.r4, tol * al.l_hat);
    check("norm_equation" + tag, r.r5, tol * (1.0 + r.r5_scale));
  }
  const Alignment al = alignment(eig, spec.basis, spec.M(), x.nu);
  const SeriesReport sr = series_expansion_check(bd, al, spec.spikes, x.nu, cfg.identities.J);
  check("series_alignment[nu=" + std::to_string(x.nu) + "]", sr.residual_alignment, tol);
  check("series_sigma3[nu=" + std::to_string(x.nu) + "]", sr.residual_sigma3, tol);

  write_json(out_path(o, "identities.json"),
             Json{{"tol", tol}, {"J", cfg.identities.J}, {"pass", pass}, {"series", to_json(sr)}, {"checks", checks}});
  m.add_file("identities.json");
  finish(m);
  for (const auto& c : checks)
    std::cout << (c["pass"].get<bool>() ? "ok   " : "FAIL ") << c["name"].get<std::string>()
              << " residual=" << c["residual"].get<double>() << " bound=" << c["bound"].get<double>() << '\n';
  return pass ? kOk : kTolerance;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::ConfigInvalid:
    case Errc::InvalidSpec:
    case Errc::IndexOutOfRange:
    case Errc::InvalidDims:
      return kConfig;
    case Errc::Io:
      return kIo;
    default:
      return is_numeric_precondition(e.code()) ? kNumeric : kConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spiked covariance eigenvalue and eigenvector toolkit"};
  app.set_version_flag("--version", SPIKEDEIG_VERSION);
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "YAML experiment file");
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "Master seed (overrides experiment.master_seed)");
    sub->add_option("--threads", o.threads, "Worker cap, 0 = all cores (fallback: SPIKED_EIG_THREADS)");
  };
  auto experiment = [&o](CLI::App* sub) {
    sub->add_option("--replicates", o.replicates, "Replicate count");
    sub->add_option("--mode", o.mode, "Statistic variant");
    sub->add_option("--x-mode", o.x_mode, "root | iter:<k0> | zero");
    sub->add_flag("--empirical", o.empirical, "Substitute sample eigenvalues for the spikes");
  };

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Options&);
    bool experiment;
  };
  const Sub subs[] = {
      {"generate", "Write X (and optionally Z) for one draw", cmd_generate, false},
      {"eigs", "Sample spectrum and spike alignments of one draw", cmd_eigs, false},
      {"clt", "Eigenvalue CLT experiment (--mode mixed|statistical|oracle)", cmd_clt, true},
      {"eigvec", "Eigenvector statistic experiment (--mode A|B|C1|C2)", cmd_eigvec, true},
      {"mp", "Tabulate the Marchenko-Pastur Stieltjes transform", cmd_mp, false},
      {"check-identities", "Exact identity suite on one draw", cmd_check_identities, false},
      {"consistency", "Eigenvalue ratio and overlap consistency", cmd_consistency, true},
      {"concentration", "Singular value and quadratic form concentration (--mode sm|hw)", cmd_concentration, true},
  };
  std::vector<std::pair<CLI::App*, int (*)(const Options&)>> registered;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    common(sub);
    if (s.experiment) experiment(sub);
    if (std::string(s.name) == "check-identities") sub->add_option("--tol", o.tol, "Residual tolerance");
    if (std::string(s.name) == "mp") {
      sub->add_option("--gamma", o.gamma, "Aspect ratio");
      sub->add_option("--z", o.z, "Grid points");
      sub->add_option("--z-from", o.z_from, "Grid start");
      sub->add_option("--z-to", o.z_to, "Grid end");
      sub->add_option("--points", o.points, "Grid size");
    }
    registered.emplace_back(sub, s.run);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    for (const auto& [sub, run] : registered)
      if (sub->parsed()) return run(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kConfig;
}
