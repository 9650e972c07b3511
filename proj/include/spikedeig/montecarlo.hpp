#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spikedeig/centering.hpp"
#include "spikedeig/concentration.hpp"
#include "spikedeig/eigvec.hpp"
#include "spikedeig/model.hpp"

namespace spikedeig {

enum class StatisticKind {
  CltMixed,
  CltStatistical,
  CltOracle,
  EigvecA,
  EigvecB,
  EigvecC1,
  EigvecC2,
  Consistency,
  ConcentrationSm,
  ConcentrationHw,
};

StatisticKind parse_statistic(const std::string& text);
std::string to_string(StatisticKind kind);
bool is_clt(StatisticKind kind);
bool is_eigvec(StatisticKind kind);
CltMode clt_mode_of(StatisticKind kind);
EigvecVariant eigvec_variant_of(StatisticKind kind);

struct ConcentrationParams {
  std::size_t p = 100;
  std::size_t q = 10;
  double t = 1.0;
  double C = 2.0;                 // band constant of the singular-value check
  std::string matrix = "identity";  // identity | zero | <path to matrix file>
  std::vector<double> t_grid;
};

struct ExperimentConfig {
  SpikedModelSpec spec;
  std::size_t nu = 1;
  std::size_t replicates = 1;
  std::uint64_t master_seed = 0;
  StatisticKind statistic = StatisticKind::CltOracle;
  std::optional<XMode> x_mode;  // default_x_mode(n, M) when unset
  bool empirical = false;
  double delta0 = 0.1;
  double eps0 = 0.0;            // separation margin reported for nu
  double coefficient_bound = 10.0;  // C of the soft O_bar / O_j size check
  std::size_t threads = 0;      // 0: hardware concurrency
  std::size_t reference_draws = 100000;  // chi-mixture reference sample size
  ConcentrationParams concentration;

  // Throws ConfigInvalid (or InvalidSpec from the model).
  void validate() const;
  XMode effective_x_mode() const;
};

struct ReplicateRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string flag;  // error name when a guard fired
  double value = 0.0;
  std::vector<std::pair<std::string, double>> extras;

  double extra(const std::string& key) const;  // NaN when absent
};

struct ExperimentReport {
  StatisticKind statistic = StatisticKind::CltOracle;
  std::size_t n = 0, N = 0, M = 0, nu = 1;
  std::size_t replicates = 0, successful = 0, flagged = 0;
  std::uint64_t master_seed = 0;
  std::string mode;    // CLT mode or eigvec variant
  std::string x_mode;
  double x = 0.0;
  double x_residual = 0.0;
  std::string x_method;
  bool empirical = false;
  bool separated = true;
  std::vector<double> samples;
  double ks_normal = 0.0;
  double mean = 0.0, variance = 0.0, skewness = 0.0, kurtosis = 0.0, median = 0.0;
  std::string reference_law;  // eigvec reference law, if any
  std::optional<double> ks_reference;
  std::size_t violations = 0;
  std::optional<SmReport> sm;
  std::optional<HwReport> hw;
  std::vector<ReplicateRecord> records;
  std::vector<std::string> warnings;
};

// Replicate r draws its data from derive_seed(master_seed, r); replicates run
// on a worker pool and are merged in index order, so the report depends only
// on the configuration.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Runs replicates [first, first + count) only; used to re-check determinism of
// a prefix without paying for the whole experiment.
std::vector<ReplicateRecord> run_replicates(const ExperimentConfig& config, std::size_t first, std::size_t count);

struct ConsistencyReport {
  std::size_t replicates = 0, successful = 0, flagged = 0;
  bool divergent = true;                   // false when no spike exceeds 1
  std::vector<double> median_inner_sq;     // per nu: median <p_nu, u_nu>^2
  std::vector<double> median_ratio_error;  // per nu: median max_{k <= nu} |l_hat_k / l_k - 1|
  std::vector<ReplicateRecord> records;
};

ConsistencyReport consistency_report(const ExperimentConfig& config);

}  // namespace spikedeig
