#include "spikedeig/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "spikedeig/block.hpp"
#include "spikedeig/errors.hpp"
#include "spikedeig/matrix_io.hpp"
#include "spikedeig/rng.hpp"
#include "spikedeig/spectral.hpp"
#include "spikedeig/stats.hpp"

namespace spikedeig {

namespace {

struct KindName {
  StatisticKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {StatisticKind::CltMixed, "clt_mixed"},
    {StatisticKind::CltStatistical, "clt_statistical"},
    {StatisticKind::CltOracle, "clt_oracle"},
    {StatisticKind::EigvecA, "eigvec_A"},
    {StatisticKind::EigvecB, "eigvec_B"},
    {StatisticKind::EigvecC1, "eigvec_C1"},
    {StatisticKind::EigvecC2, "eigvec_C2"},
    {StatisticKind::Consistency, "consistency"},
    {StatisticKind::ConcentrationSm, "concentration_sm"},
    {StatisticKind::ConcentrationHw, "concentration_hw"},
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t resolve_threads(std::size_t requested, std::size_t work) {
  std::size_t t = requested;
  if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(t, work));
}

// Quantities shared by every replicate of one experiment.
struct Context {
  double x = 0.0;
  double x_residual = 0.0;
  std::string x_method;
  Matrix hw_matrix;
};

Matrix concentration_matrix(const ConcentrationParams& cp) {
  if (cp.matrix == "identity") return Matrix::Identity(cp.p, cp.p);
  if (cp.matrix == "zero") return Matrix::Zero(cp.p, cp.p);
  Matrix c = read_matrix(cp.matrix);
  if (static_cast<std::size_t>(c.rows()) != cp.p || static_cast<std::size_t>(c.cols()) != cp.p)
    throw Error(Errc::ConfigInvalid, "concentration.matrix must be p x p");
  return c;
}

Context build_context(const ExperimentConfig& cfg, std::vector<std::string>& warnings) {
  Context ctx;
  const auto kind = cfg.statistic;
  if (is_clt(kind) && kind != StatisticKind::CltStatistical) {
    const XMode xm = cfg.effective_x_mode();
    if (xm.kind != XMode::Kind::Zero) {
      const PolynomialCoefficients pc = polynomial_coefficients(cfg.spec.spikes, cfg.nu, cfg.spec.n);
      for (auto& w : coefficient_bound_warnings(pc, cfg.coefficient_bound)) warnings.push_back(w);
      if (xm.kind == XMode::Kind::Root) {
        const XRoot root = solve_x(pc);
        ctx.x = root.x;
        ctx.x_residual = root.residual;
        ctx.x_method = root.method;
      } else {
        ctx.x = iterate_x_expansion(pc, xm.k0);
        ctx.x_residual = std::abs(ctx.x - x_polynomial(pc, ctx.x));
        ctx.x_method = "iterated";
      }
    } else {
      ctx.x_method = "zero";
    }
  }
  if (kind == StatisticKind::ConcentrationHw) ctx.hw_matrix = concentration_matrix(cfg.concentration);
  return ctx;
}

std::vector<double> top_values(const Vector& ev, std::size_t M) {
  return std::vector<double>(ev.data(), ev.data() + M);
}

// Sample covariance of one replicate together with the bulk block S_BB when
// requested (taken from Z, i.e. in population coordinates).
struct Instance {
  Matrix S;
  Matrix S_BB;
};

Instance make_instance(const SpikedModelSpec& spec, std::uint64_t seed, bool want_bulk) {
  const std::size_t M = spec.M();
  Matrix Z = sample_entry_matrix(spec.N, spec.n, spec.law, seed);
  Instance inst;
  if (want_bulk && spec.basis) inst.S_BB = sample_covariance(Z.bottomRows(spec.N - M));
  for (std::size_t k = 0; k < M; ++k) Z.row(k) *= std::sqrt(spec.spikes[k]);
  if (spec.basis) {
    const Matrix X = (*spec.basis) * Z;
    inst.S = sample_covariance(X);
  } else {
    inst.S = sample_covariance(Z);
    // Bulk rows are unscaled, so this block is exactly (1/n) Z_B Z_B^T.
    if (want_bulk) inst.S_BB = inst.S.bottomRightCorner(spec.N - M, spec.N - M);
  }
  return inst;
}

void clt_replicate(const ExperimentConfig& cfg, const Context& ctx, ReplicateRecord& rec) {
  const auto& spec = cfg.spec;
  const CltMode mode = clt_mode_of(cfg.statistic);
  const bool need_bulk = mode != CltMode::Oracle;
  const Instance inst = make_instance(spec, rec.seed, need_bulk);
  const std::vector<double> l_hat = top_values(sym_eigenvalues(inst.S), spec.M());
  const double lv = spec.spikes[cfg.nu - 1];
  const double lh = l_hat[cfg.nu - 1];
  CenteringBundle b;
  b.scale = std::sqrt(static_cast<double>(spec.n) / (spec.law.fourth_moment() - 1.0));
  b.x = ctx.x;
  rec.extras.emplace_back("l_hat", lh);
  if (need_bulk) {
    const Vector M_diag = sym_eigenvalues(inst.S_BB);
    b.c_tr = trace_centering(M_diag, lh, spec.n);
    rec.extras.emplace_back("c_tr", b.c_tr);
  }
  if (mode == CltMode::Statistical) {
    b.stat_sum = statistical_centering(l_hat, cfg.nu, spec.n);
    rec.extras.emplace_back("stat_sum", b.stat_sum);
  } else {
    if (mode == CltMode::Oracle) {
      b.oracle = oracle_centering(lv, spec.N, spec.M(), spec.n);
      rec.extras.emplace_back("oracle", b.oracle);
    }
    rec.extras.emplace_back("x", b.x);
    rec.extras.emplace_back("x_residual", ctx.x_residual);
  }
  rec.value = clt_statistic(lh, lv, b, mode);
}

void eigvec_replicate(const ExperimentConfig& cfg, ReplicateRecord& rec) {
  const auto& spec = cfg.spec;
  const std::size_t M = spec.M();
  const Instance inst = make_instance(spec, rec.seed, false);
  const EigenSystem top = sym_eigen_top(inst.S, M);
  const Alignment al = alignment(top, spec.basis, M, cfg.nu);
  if (al.flagged) throw Error(Errc::DegenerateAlignment, "<p, u> vanishes numerically");
  const EigvecVariant variant = eigvec_variant_of(cfg.statistic);
  const std::vector<double> l_hat = top_values(top.values, M);
  const double det = eigvec_statistic(al, spec.spikes, cfg.nu, spec.n, spec.N, variant, false).value;
  const double emp = eigvec_statistic(al, l_hat, cfg.nu, spec.n, spec.N, variant, true).value;
  rec.value = cfg.empirical ? emp : det;
  rec.extras.emplace_back("l_hat", al.l_hat);
  rec.extras.emplace_back("inner_sq", al.inner * al.inner);
  rec.extras.emplace_back("one_minus_inner_sq", al.one_minus_inner_sq);
  rec.extras.emplace_back("R", al.R);
  rec.extras.emplace_back("deterministic", det);
  rec.extras.emplace_back("empirical", emp);
}

void consistency_replicate(const ExperimentConfig& cfg, ReplicateRecord& rec) {
  const auto& spec = cfg.spec;
  const std::size_t M = spec.M();
  const Instance inst = make_instance(spec, rec.seed, false);
  const EigenSystem top = sym_eigen_top(inst.S, M);
  double worst = 0.0;
  for (std::size_t k = 1; k <= M; ++k) {
    worst = std::max(worst, std::abs(top.values(k - 1) / spec.spikes[k - 1] - 1.0));
    const Alignment al = alignment(top, spec.basis, M, k);
    rec.extras.emplace_back("inner_sq_" + std::to_string(k), al.inner * al.inner);
    rec.extras.emplace_back("ratio_error_" + std::to_string(k), worst);
  }
  rec.value = worst;
}

ReplicateRecord run_one(const ExperimentConfig& cfg, const Context& ctx, std::size_t r) {
  ReplicateRecord rec;
  rec.index = r;
  rec.seed = rng::derive_seed(cfg.master_seed, r);
  try {
    const auto kind = cfg.statistic;
    if (is_clt(kind)) {
      clt_replicate(cfg, ctx, rec);
    } else if (is_eigvec(kind)) {
      eigvec_replicate(cfg, rec);
    } else if (kind == StatisticKind::Consistency) {
      consistency_replicate(cfg, rec);
    } else if (kind == StatisticKind::ConcentrationSm) {
      const auto& cp = cfg.concentration;
      const auto [s1, sq] = extreme_singular_values(cp.p, cp.q, cfg.spec.law, rec.seed);
      const double half = cp.C * (std::sqrt(static_cast<double>(cp.q)) + cp.t);
      const double root = std::sqrt(static_cast<double>(cp.p));
      const bool out = s1 > root + half || s1 < root - half || sq > root + half || sq < root - half;
      rec.value = s1;
      rec.extras.emplace_back("s_q", sq);
      rec.extras.emplace_back("violation", out ? 1.0 : 0.0);
    } else {
      const auto [quad, bil] = hw_forms(ctx.hw_matrix, cfg.spec.law, rec.seed);
      rec.value = quad;
      rec.extras.emplace_back("bilinear", bil);
    }
  } catch (const Error& e) {
    if (!is_numeric_precondition(e.code())) throw;
    rec.ok = false;
    rec.flag = errc_name(e.code());
    rec.value = kNaN;
  }
  return rec;
}

std::vector<ReplicateRecord> run_range(const ExperimentConfig& cfg, const Context& ctx, std::size_t first,
                                       std::size_t count) {
  std::vector<ReplicateRecord> records(count);
  const std::size_t workers = resolve_threads(cfg.threads, count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        records[i] = run_one(cfg, ctx, first + i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

}  // namespace

StatisticKind parse_statistic(const std::string& text) {
  for (const auto& kn : kKindNames)
    if (text == kn.name) return kn.kind;
  throw Error(Errc::ConfigInvalid, "unknown statistic '" + text + "'");
}

std::string to_string(StatisticKind kind) {
  for (const auto& kn : kKindNames)
    if (kind == kn.kind) return kn.name;
  return "unknown";
}

bool is_clt(StatisticKind k) {
  return k == StatisticKind::CltMixed || k == StatisticKind::CltStatistical || k == StatisticKind::CltOracle;
}

bool is_eigvec(StatisticKind k) {
  return k == StatisticKind::EigvecA || k == StatisticKind::EigvecB || k == StatisticKind::EigvecC1 ||
         k == StatisticKind::EigvecC2;
}

CltMode clt_mode_of(StatisticKind k) {
  switch (k) {
    case StatisticKind::CltMixed: return CltMode::Mixed;
    case StatisticKind::CltStatistical: return CltMode::Statistical;
    case StatisticKind::CltOracle: return CltMode::Oracle;
    default: break;
  }
  throw Error(Errc::ConfigInvalid, "not a CLT statistic");
}

EigvecVariant eigvec_variant_of(StatisticKind k) {
  switch (k) {
    case StatisticKind::EigvecA: return EigvecVariant::A;
    case StatisticKind::EigvecB: return EigvecVariant::B;
    case StatisticKind::EigvecC1: return EigvecVariant::C1;
    case StatisticKind::EigvecC2: return EigvecVariant::C2;
    default: break;
  }
  throw Error(Errc::ConfigInvalid, "not an eigenvector statistic");
}

double ReplicateRecord::extra(const std::string& key) const {
  for (const auto& [k, v] : extras)
    if (k == key) return v;
  return kNaN;
}

XMode ExperimentConfig::effective_x_mode() const {
  return x_mode ? *x_mode : default_x_mode(spec.n, spec.M());
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::ConfigInvalid, msg); };
  if (replicates < 1) fail("experiment.replicates must be >= 1");
  if (!(eps0 >= 0.0)) fail("experiment.eps0 must be >= 0");
  const auto kind = statistic;
  if (kind == StatisticKind::ConcentrationSm || kind == StatisticKind::ConcentrationHw) {
    if (concentration.p < 1 || concentration.q < 1) fail("concentration.p and concentration.q must be >= 1");
    if (kind == StatisticKind::ConcentrationHw && concentration.t_grid.empty())
      fail("concentration.t_grid must not be empty");
    return;
  }
  spec.validate();
  if (spec.M() < 1) fail("model.spikes must hold at least one spike");
  if (kind != StatisticKind::Consistency && (nu < 1 || nu > spec.M())) fail("experiment.nu must lie in 1..M");
  if (is_clt(kind) && !spec.law.clt_eligible(delta0))
    fail("entry law " + spec.law.name() + " has E z^4 < 1 + delta0 and is not eligible for CLT experiments");
}

std::vector<ReplicateRecord> run_replicates(const ExperimentConfig& config, std::size_t first, std::size_t count) {
  config.validate();
  std::vector<std::string> warnings;
  const Context ctx = build_context(config, warnings);
  return run_range(config, ctx, first, count);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport rep;
  const Context ctx = build_context(config, rep.warnings);
  const auto kind = config.statistic;
  rep.statistic = kind;
  rep.n = config.spec.n;
  rep.N = config.spec.N;
  rep.M = config.spec.M();
  rep.nu = config.nu;
  rep.replicates = config.replicates;
  rep.master_seed = config.master_seed;
  rep.empirical = config.empirical;
  if (is_clt(kind)) {
    rep.mode = to_string(clt_mode_of(kind));
    rep.x_mode = kind == StatisticKind::CltStatistical ? "unused" : config.effective_x_mode().to_string();
    rep.x = ctx.x;
    rep.x_residual = ctx.x_residual;
    rep.x_method = ctx.x_method;
  } else if (is_eigvec(kind)) {
    rep.mode = to_string(eigvec_variant_of(kind));
  }
  if ((is_clt(kind) || is_eigvec(kind)) && rep.M >= 1) {
    const SeparationProfile sep = check_separation(config.spec.spikes, config.nu, config.eps0);
    rep.separated = sep.separated;
    if (!sep.separated) rep.warnings.push_back("spike nu is not separated at eps0; outside the theorems' scope");
  }

  rep.records = run_range(config, ctx, 0, config.replicates);
  for (const auto& r : rep.records) {
    if (r.ok) {
      rep.samples.push_back(r.value);
      ++rep.successful;
    } else {
      ++rep.flagged;
    }
  }
  if (!rep.samples.empty()) {
    rep.ks_normal = ks_statistic(rep.samples, normal_cdf);
    const Moments m = sample_moments(rep.samples);
    rep.mean = m.mean;
    rep.variance = m.variance;
    rep.skewness = m.skewness;
    rep.kurtosis = m.kurtosis;
    rep.median = median(rep.samples);
  }

  if (kind == StatisticKind::EigvecC1 && !rep.samples.empty()) {
    const RatioCoefficients rc = ratio_coefficients(config.spec.spikes, config.nu, rep.n, rep.M);
    const auto ref = chi_mixture_samples(rc.c, config.reference_draws, rng::mix64(config.master_seed ^ 0xC1C1C1C1ull));
    rep.reference_law = "chi_mixture";
    rep.ks_reference = ks_two_sample(rep.samples, ref);
  } else if (kind == StatisticKind::EigvecC2 && !rep.samples.empty()) {
    const RatioCoefficients rc = ratio_coefficients(config.spec.spikes, config.nu, rep.n, rep.M);
    const double sd = *rc.c_nu * std::sqrt(2.0 * rc.sigma_nu);
    rep.reference_law = "scaled_normal";
    if (sd > 0.0) rep.ks_reference = ks_statistic(rep.samples, [sd](double t) { return normal_cdf(t / sd); });
  }

  if (kind == StatisticKind::ConcentrationSm) {
    const auto& cp = config.concentration;
    SmReport sm;
    sm.reps = config.replicates;
    const double half = cp.C * (std::sqrt(static_cast<double>(cp.q)) + cp.t);
    sm.lower = std::sqrt(static_cast<double>(cp.p)) - half;
    sm.upper = std::sqrt(static_cast<double>(cp.p)) + half;
    sm.min_sq = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.records) {
      sm.max_s1 = std::max(sm.max_s1, r.value);
      sm.min_sq = std::min(sm.min_sq, r.extra("s_q"));
      if (r.extra("violation") > 0.5) ++sm.violations;
    }
    sm.rate = static_cast<double>(sm.violations) / static_cast<double>(sm.reps);
    rep.violations = sm.violations;
    rep.sm = sm;
  } else if (kind == StatisticKind::ConcentrationHw) {
    // Same seeds as concentration_hw_check, so the curves agree exactly.
    std::vector<double> quad, bil;
    for (const auto& r : rep.records) {
      quad.push_back(r.value);
      bil.push_back(r.extra("bilinear"));
    }
    rep.hw = hw_report_from_samples(config.concentration.p, operator_norm(ctx.hw_matrix),
                                    config.concentration.t_grid, quad, bil);
  }
  return rep;
}

ConsistencyReport consistency_report(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.statistic = StatisticKind::Consistency;
  cfg.validate();
  ConsistencyReport out;
  out.replicates = cfg.replicates;
  out.divergent = std::any_of(cfg.spec.spikes.begin(), cfg.spec.spikes.end(), [](double l) { return l > 1.0; });
  std::vector<std::string> warnings;
  const Context ctx = build_context(cfg, warnings);
  out.records = run_range(cfg, ctx, 0, cfg.replicates);
  const std::size_t M = cfg.spec.M();
  std::vector<std::vector<double>> inner(M), ratio(M);
  for (const auto& r : out.records) {
    if (!r.ok) {
      ++out.flagged;
      continue;
    }
    ++out.successful;
    for (std::size_t k = 1; k <= M; ++k) {
      inner[k - 1].push_back(r.extra("inner_sq_" + std::to_string(k)));
      ratio[k - 1].push_back(r.extra("ratio_error_" + std::to_string(k)));
    }
  }
  for (std::size_t k = 0; k < M; ++k) {
    out.median_inner_sq.push_back(inner[k].empty() ? kNaN : median(inner[k]));
    out.median_ratio_error.push_back(ratio[k].empty() ? kNaN : median(ratio[k]));
  }
  return out;
}

}  // namespace spikedeig
