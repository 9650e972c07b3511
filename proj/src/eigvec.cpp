#include "spikedeig/eigvec.hpp"

#include <cmath>
#include <limits>

#include "spikedeig/centering.hpp"
#include "spikedeig/errors.hpp"
#include "spikedeig/rng.hpp"

namespace spikedeig {

namespace {

constexpr std::uint32_t kChiStream = 0x43484931u;

std::vector<double> ratio_vector(const std::vector<double>& l, std::size_t nu) {
  std::vector<double> c;
  const double lv = l[nu - 1];
  for (std::size_t k = 0; k < l.size(); ++k) {
    if (k == nu - 1) continue;
    const double gap = l[k] - lv;
    if (std::abs(gap) < 1e-12 * std::abs(lv)) throw Error(Errc::NotSeparated, "spike tie at nu");
    c.push_back(l[k] * lv / (gap * gap));
  }
  return c;
}

double double_factorial_odd(unsigned q) {  // (2q)! / (2^q q!) = (2q-1)!!
  double acc = 1.0;
  for (unsigned i = 1; i <= q; ++i) acc *= 2.0 * i - 1.0;
  return acc;
}

double factorial(unsigned k) {
  double acc = 1.0;
  for (unsigned i = 2; i <= k; ++i) acc *= i;
  return acc;
}

// Sums over compositions q of `remaining` into the weights from `index` on.
double moment_recurse(const std::vector<double>& c, std::size_t index, unsigned remaining, double weight) {
  if (index + 1 == c.size()) {
    const unsigned q = remaining;
    return weight * double_factorial_odd(q) * std::pow(c[index], q) / factorial(q);
  }
  double acc = 0.0;
  for (unsigned q = 0; q <= remaining; ++q) {
    const double w = weight * double_factorial_odd(q) * std::pow(c[index], q) / factorial(q);
    acc += moment_recurse(c, index + 1, remaining - q, w);
  }
  return acc;
}

}  // namespace

RatioCoefficients ratio_coefficients(const std::vector<double>& spikes, std::size_t nu, std::size_t n,
                                     std::size_t M) {
  if (nu < 1 || nu > spikes.size()) throw Error(Errc::IndexOutOfRange, "nu must lie in 1..M");
  if (M < 1) throw Error(Errc::InvalidDims, "M must be positive");
  RatioCoefficients out;
  out.nu = nu;
  out.c = ratio_vector(spikes, nu);
  double acc = 0.0;
  for (double ck : out.c) acc += ck * ck;
  out.sigma_nu = acc / static_cast<double>(M);
  if (n > 0) out.c_nu = spikes[nu - 1] / (static_cast<double>(n) / static_cast<double>(M));
  return out;
}

EigvecVariant parse_eigvec_variant(const std::string& text) {
  if (text == "A" || text == "a") return EigvecVariant::A;
  if (text == "B" || text == "b") return EigvecVariant::B;
  if (text == "C1" || text == "c1") return EigvecVariant::C1;
  if (text == "C2" || text == "c2") return EigvecVariant::C2;
  throw Error(Errc::ConfigInvalid, "variant must be A, B, C1 or C2, got '" + text + "'");
}

std::string to_string(EigvecVariant v) {
  switch (v) {
    case EigvecVariant::A: return "A";
    case EigvecVariant::B: return "B";
    case EigvecVariant::C1: return "C1";
    case EigvecVariant::C2: return "C2";
  }
  return "A";
}

EigvecStatistic eigvec_statistic(const Alignment& al, const std::vector<double>& values, std::size_t nu,
                                 std::size_t n, std::size_t N, EigvecVariant variant, bool empirical) {
  if (nu < 1 || nu > values.size()) throw Error(Errc::IndexOutOfRange, "nu must lie in 1..M");
  const double dn = static_cast<double>(n);
  const double l = values[nu - 1];
  const double gap = al.one_minus_inner_sq;
  EigvecStatistic out;
  out.variant = variant;
  out.empirical = empirical;
  switch (variant) {
    case EigvecVariant::A:
      out.value = l * gap - static_cast<double>(N) / dn;
      break;
    case EigvecVariant::B:
    case EigvecVariant::C2: {
      double sum = 0.0;
      for (double ck : ratio_vector(values, nu)) sum += ck;
      out.value = l * gap - l / dn * sum - static_cast<double>(N) / dn;
      break;
    }
    case EigvecVariant::C1:
      out.value = dn * gap;
      break;
  }
  return out;
}

std::vector<double> chi_mixture_samples(const std::vector<double>& c, std::size_t count, std::uint64_t seed) {
  rng::Stream stream(seed, kChiStream);
  std::vector<double> out(count, 0.0);
  for (auto& x : out) {
    double acc = 0.0;
    for (double ck : c) {
      const double y = stream.normal();
      acc += ck * y * y;
    }
    x = acc;
  }
  return out;
}

double chi_mixture_sample(const std::vector<double>& c, std::uint64_t seed) {
  return chi_mixture_samples(c, 1, seed)[0];
}

double chi_mixture_moment(const std::vector<double>& c, unsigned m) {
  if (m > 8 || c.size() > 12) throw Error(Errc::TooLarge, "chi_mixture_moment caps m <= 8 and 12 weights");
  if (m == 0) return 1.0;
  if (c.empty()) return 0.0;
  return factorial(m) * moment_recurse(c, 0, m, 1.0);
}

LemmaDiagnostics lemma_diagnostics(const BlockDecomposition& bd, const Alignment& al, std::size_t nu) {
  const std::size_t M = bd.M;
  if (nu < 1 || nu > M) throw Error(Errc::IndexOutOfRange, "nu must lie in 1..M");
  const double top = bd.M_diag.size() ? bd.M_diag(0) : 0.0;
  if (!(al.l_hat > top)) throw Error(Errc::NotInvertible, "l_hat must exceed max(M_diag)");
  const std::size_t v = nu - 1;
  Vector g1(bd.M_diag.size()), g2(bd.M_diag.size());
  for (Eigen::Index i = 0; i < g1.size(); ++i) {
    const double m = bd.M_diag(i);
    g1(i) = m / (al.l_hat - m);
    g2(i) = g1(i) / (al.l_hat - m);
  }
  const Vector w1 = bd.T.transpose() * g1.asDiagonal() * bd.T.col(v);
  const Vector w2 = bd.T.transpose() * g2.asDiagonal() * bd.T.col(v);
  const double l = bd.spikes(v);
  LemmaDiagnostics out;
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < M; ++k) {
    if (k == v) continue;
    s1 += w1(k) * w1(k);
    s2 += w2(k) * w2(k);
  }
  out.lemma1_first = static_cast<double>(bd.n) / static_cast<double>(M) * s1;
  out.lemma1_second = l * l * l * l * s2;

  const Matrix D = d_matrix(bd, al.l_hat);
  Vector rde = D.col(v);
  for (std::size_t k = 0; k < M; ++k) rde(k) = k == v ? 0.0 : rde(k) / (bd.spikes(k) - l);
  out.beta = rde.norm();
  double perp2 = 0.0;
  for (std::size_t k = 0; k < M; ++k)
    if (k != v) perp2 += al.a(k) * al.a(k);
  const double diff_nu = perp2 / (1.0 + al.a(v));
  const double ae = std::sqrt(perp2 + diff_nu * diff_nu);
  out.beta_ratio = out.beta > 0.0 ? ae / out.beta : (ae == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  out.lemma3 = al.l_hat * al.R * al.R - static_cast<double>(bd.N) / static_cast<double>(bd.n);
  return out;
}

}  // namespace spikedeig
