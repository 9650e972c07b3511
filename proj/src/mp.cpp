#include "spikedeig/mp.hpp"

#include <cmath>
#include <numbers>

#include "spikedeig/errors.hpp"

namespace spikedeig {

namespace {

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(Errc::InvalidSpec, "gamma must be positive");
}

}  // namespace

MPParams::MPParams(double g) : gamma(g) { require_gamma(g); }

std::pair<double, double> MPParams::edges() const { return mp_edges(gamma); }

std::pair<double, double> mp_edges(double gamma) {
  require_gamma(gamma);
  const double r = std::sqrt(gamma);
  return {(1.0 - r) * (1.0 - r), (1.0 + r) * (1.0 + r)};
}

double mp_density(double x, double gamma) {
  const auto [a, b] = mp_edges(gamma);
  if (x <= 0.0 || x < a || x > b) return 0.0;
  return std::sqrt((b - x) * (x - a)) / (2.0 * std::numbers::pi * gamma * x);
}

double mp_stieltjes(double z, double gamma) {
  const double b = mp_edges(gamma).second;
  if (z < b - 1e-12 * b) throw Error(Errc::InsideBulk, "z lies inside the Marchenko-Pastur bulk");
  const double shifted = z - gamma + 1.0;
  double disc = shifted * shifted - 4.0 * z;
  if (disc < 0.0) {
    if (disc < -1e-12 * z) throw Error(Errc::InsideBulk, "negative discriminant right of the edge");
    disc = 0.0;
  }
  // 2 / (z + gamma - 1 + sqrt(disc)) equals the textbook root
  // (z + gamma - 1 - sqrt(disc)) / (2 gamma z) without its cancellation.
  return 2.0 / (z + gamma - 1.0 + std::sqrt(disc));
}

double mp_quadratic_residual(double z, double gamma, double m) {
  return gamma * z * m * m - m * (z + gamma - 1.0) + 1.0;
}

double empirical_stieltjes(const Vector& M_diag, double z, std::size_t N, std::size_t M) {
  if (N <= M) throw Error(Errc::InvalidDims, "empirical_stieltjes needs N > M");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < M_diag.size(); ++i) {
    if (!(z > M_diag(i))) throw Error(Errc::InsideSpectrum, "z does not exceed the spectrum");
    acc += 1.0 / (z - M_diag(i));
  }
  return acc / static_cast<double>(N - M);
}

double spike_forward_map(double l, double gamma) {
  if (l <= 1.0 + 1e-12) throw Error(Errc::SpikeAtOne, "spike must exceed 1");
  return l * (1.0 + gamma / (l - 1.0));
}

double inversion_gap(const Vector& M_diag, double l_nu, std::size_t N, std::size_t M, std::size_t n) {
  if (N <= M) throw Error(Errc::InvalidDims, "inversion_gap needs N > M");
  const double gamma_n = static_cast<double>(N - M) / static_cast<double>(n);
  const double lbar = spike_forward_map(l_nu, gamma_n);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < M_diag.size(); ++i) {
    const double m = M_diag(i);
    if (!(lbar > m)) throw Error(Errc::NotInvertible, "lbar does not exceed the bulk spectrum");
    acc += m / (lbar - m);
  }
  return std::sqrt(static_cast<double>(n)) * (1.0 / (l_nu - 1.0) - acc / static_cast<double>(N - M));
}

}  // namespace spikedeig
