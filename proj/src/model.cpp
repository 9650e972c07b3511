#include "spikedeig/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "spikedeig/errors.hpp"
#include "spikedeig/rng.hpp"

namespace spikedeig {

namespace {

// Word 2 of the Philox counter separates the Gaussian and uniform draw
// families so that one seed never reuses a counter across laws.
constexpr std::uint32_t kGaussianTag = 0x47415553u;
constexpr std::uint32_t kUniformTag = 0x554E4946u;

rng::Block pair_block(std::uint64_t pair, std::uint32_t tag, const rng::Key& key) {
  const rng::Block ctr = {static_cast<std::uint32_t>(pair), static_cast<std::uint32_t>(pair >> 32), tag, 0u};
  return rng::philox4x32_10(ctr, key);
}

// Solves E exp(z^2 / t^2) = 2 for t by bisection; `mgf` evaluates the left side.
template <class F>
double solve_psi2(F mgf) {
  double lo = 0.3, hi = 20.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mgf(mid) > 2.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::string strip(const std::string& s) {
  std::string out;
  for (char c : s) if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

double parse_number(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::InvalidSpec, "cannot parse number '" + s + "' in '" + context + "'");
  }
}

}  // namespace

EntryLaw EntryLaw::two_point(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(Errc::InvalidSpec, "two-point law needs p in (0, 1)");
  return EntryLaw(LawKind::TwoPointSymmetric, p);
}

double EntryLaw::fourth_moment() const {
  switch (kind_) {
    case LawKind::Gaussian: return 3.0;
    case LawKind::UniformScaled: return 9.0 / 5.0;
    case LawKind::TwoPointSymmetric: {
      const double q = 1.0 - p_;
      return (q * q * q + p_ * p_ * p_) / (p_ * q);
    }
  }
  return 0.0;
}

double EntryLaw::psi2_bound() const {
  switch (kind_) {
    case LawKind::Gaussian:
      return std::sqrt(8.0 / 3.0);
    case LawKind::UniformScaled: {
      const double half = std::sqrt(3.0);
      return solve_psi2([half](double t) {
        // Simpson on [0, sqrt 3] of exp(x^2/t^2), divided by sqrt 3.
        const int m = 2000;
        const double h = half / m;
        double acc = 0.0;
        for (int i = 0; i <= m; ++i) {
          const double x = i * h;
          const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
          acc += w * std::exp(x * x / (t * t));
        }
        return acc * h / 3.0 / half;
      });
    }
    case LawKind::TwoPointSymmetric: {
      const double a2 = (1.0 - p_) / p_;
      const double b2 = p_ / (1.0 - p_);
      const double p = p_;
      return solve_psi2([=](double t) {
        return p * std::exp(a2 / (t * t)) + (1.0 - p) * std::exp(b2 / (t * t));
      });
    }
  }
  return 0.0;
}

std::string EntryLaw::name() const {
  switch (kind_) {
    case LawKind::Gaussian: return "gaussian";
    case LawKind::UniformScaled: return "uniform";
    case LawKind::TwoPointSymmetric: {
      std::ostringstream os;
      os.precision(17);
      os << "two_point:" << p_;
      return os.str();
    }
  }
  return "unknown";
}

double EntryLaw::from_uniform(double u) const {
  switch (kind_) {
    case LawKind::UniformScaled:
      return std::sqrt(3.0) * (2.0 * u - 1.0);
    case LawKind::TwoPointSymmetric:
      return u < p_ ? std::sqrt((1.0 - p_) / p_) : -std::sqrt(p_ / (1.0 - p_));
    case LawKind::Gaussian:
      break;
  }
  throw Error(Errc::InvalidSpec, "from_uniform is not defined for the Gaussian law");
}

EntryLaw parse_entry_law(const std::string& text) {
  const std::string s = strip(text);
  if (s == "gaussian" || s == "normal") return EntryLaw::gaussian();
  if (s == "uniform" || s == "uniform_scaled") return EntryLaw::uniform_scaled();
  if (s == "rademacher") return EntryLaw::two_point(0.5);
  const std::string prefix = "two_point:";
  if (s.rfind(prefix, 0) == 0) return EntryLaw::two_point(parse_number(s.substr(prefix.size()), text));
  throw Error(Errc::InvalidSpec, "unknown entry law '" + text + "'");
}

double SpikeRule::evaluate(std::size_t n) const {
  return exponent == 0.0 ? coefficient : coefficient * std::pow(static_cast<double>(n), exponent);
}

SpikeRule parse_spike_rule(const std::string& text) {
  const std::string s = strip(text);
  if (s.empty()) throw Error(Errc::InvalidSpec, "empty spike rule");
  const auto npos = s.find('n');
  if (npos == std::string::npos) return {parse_number(s, text), 0.0};
  SpikeRule rule;
  const std::string head = s.substr(0, npos);
  const std::string tail = s.substr(npos + 1);
  if (!head.empty()) {
    if (head.back() != '*') throw Error(Errc::InvalidSpec, "spike rule '" + text + "' must read c*n^a");
    rule.coefficient = parse_number(head.substr(0, head.size() - 1), text);
  }
  if (tail.empty()) {
    rule.exponent = 1.0;
  } else if (tail[0] == '^') {
    rule.exponent = parse_number(tail.substr(1), text);
  } else {
    throw Error(Errc::InvalidSpec, "spike rule '" + text + "' must read c*n^a");
  }
  return rule;
}

void SpikedModelSpec::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::InvalidSpec, msg); };
  if (n < 1 || N < 1) fail("n and N must be positive");
  const std::size_t m = M();
  if (m >= N) fail("spike count M must be below N");
  if (m >= n) fail("spike count M must be below n");
  for (std::size_t k = 0; k < m; ++k) {
    if (!std::isfinite(spikes[k]) || spikes[k] < 1.0) fail("spikes must be finite and >= 1");
    if (k > 0 && spikes[k] > spikes[k - 1]) fail("spikes must be sorted in descending order");
  }
  if (!(gamma_bound >= 1.0)) fail("gamma_bound must be >= 1");
  const double ratio = static_cast<double>(N) / static_cast<double>(n);
  if (ratio > gamma_bound || ratio < 1.0 / gamma_bound) fail("N/n outside [1/gamma, gamma]");
  if (basis) {
    if (static_cast<std::size_t>(basis->rows()) != N || static_cast<std::size_t>(basis->cols()) != N)
      fail("basis must be N x N");
    const Matrix gram = basis->transpose() * (*basis);
    const double dev = (gram - Matrix::Identity(N, N)).cwiseAbs().maxCoeff();
    if (dev > 1e-10) fail("basis is not orthogonal to 1e-10");
  }
}

Matrix SpikedModelSpec::covariance() const {
  Vector d = Vector::Ones(N);
  for (std::size_t k = 0; k < M(); ++k) d[k] = spikes[k];
  if (!basis) return d.asDiagonal();
  return (*basis) * d.asDiagonal() * basis->transpose();
}

Matrix sample_entry_matrix(std::size_t rows, std::size_t cols, const EntryLaw& law, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw Error(Errc::InvalidDims, "sample_entry_matrix needs rows, cols >= 1");
  Matrix out(rows, cols);
  double* data = out.data();
  const std::uint64_t total = static_cast<std::uint64_t>(rows) * cols;
  const rng::Key key = rng::key_from_seed(seed);
  if (law.kind() == LawKind::Gaussian) {
    for (std::uint64_t pair = 0; 2 * pair < total; ++pair) {
      const auto z = rng::box_muller(pair_block(pair, kGaussianTag, key));
      data[2 * pair] = z[0];
      if (2 * pair + 1 < total) data[2 * pair + 1] = z[1];
    }
  } else {
    for (std::uint64_t pair = 0; 2 * pair < total; ++pair) {
      const auto w = pair_block(pair, kUniformTag, key);
      data[2 * pair] = law.from_uniform(rng::to_unit(w[0], w[1]));
      if (2 * pair + 1 < total) data[2 * pair + 1] = law.from_uniform(rng::to_unit(w[2], w[3]));
    }
  }
  return out;
}

DataSample generate_data(const SpikedModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  DataSample out;
  out.Z = sample_entry_matrix(spec.N, spec.n, spec.law, seed);
  Matrix scaled = out.Z;
  for (std::size_t k = 0; k < spec.M(); ++k) scaled.row(k) *= std::sqrt(spec.spikes[k]);
  out.X = spec.basis ? Matrix((*spec.basis) * scaled) : std::move(scaled);
  return out;
}

Matrix random_orthogonal(std::size_t N, std::uint64_t seed) {
  const Eigen::MatrixXd g = sample_entry_matrix(N, N, EntryLaw::gaussian(), seed);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const auto& r = qr.matrixQR();
  for (std::size_t i = 0; i < N; ++i)
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  return q;
}

SeparationProfile check_separation(const std::vector<double>& spikes, std::size_t nu, double eps0) {
  const std::size_t m = spikes.size();
  if (nu < 1 || nu > m) throw Error(Errc::IndexOutOfRange, "nu must lie in 1..M");
  SeparationProfile out;
  out.nu = nu;
  out.eps0 = eps0;
  const double l = spikes[nu - 1];
  for (double lk : spikes) out.ratios.push_back(lk / l);
  const double below = nu < m ? spikes[nu] : 1.0;
  out.lower_gap = l / below > 1.0 + eps0;
  // With l_0 = 1 the upper constraint could never hold for a divergent l_1;
  // only the lower gap is meaningful at nu = 1.
  out.upper_gap = nu == 1 ? true : spikes[nu - 2] / l > 1.0 + eps0;
  out.separated = out.lower_gap && out.upper_gap;
  return out;
}

}  // namespace spikedeig
