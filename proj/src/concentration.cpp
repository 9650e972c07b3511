#include "spikedeig/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spikedeig/errors.hpp"
#include "spikedeig/rng.hpp"
#include "spikedeig/spectral.hpp"

namespace spikedeig {

std::pair<double, double> extreme_singular_values(std::size_t p, std::size_t q, const EntryLaw& law,
                                                  std::uint64_t seed) {
  if (p < 1 || q < 1) throw Error(Errc::InvalidDims, "p and q must be positive");
  const Matrix a = sample_entry_matrix(p, q, law, seed);
  const Vector ev = sym_eigenvalues(Matrix(a.transpose() * a));
  const double s1 = std::sqrt(std::max(0.0, ev(0)));
  // For q > p the q-th singular value is 0.
  const double sq = q > p ? 0.0 : std::sqrt(std::max(0.0, ev(ev.size() - 1)));
  return {s1, sq};
}

std::pair<double, double> hw_forms(const Matrix& C, const EntryLaw& law, std::uint64_t seed) {
  const std::size_t p = C.rows();
  const Matrix y = sample_entry_matrix(2, p, law, seed);
  const Vector y1 = y.row(0).transpose();
  const Vector y2 = y.row(1).transpose();
  return {std::abs(y1.dot(C * y1) - C.trace()), std::abs(y1.dot(C * y2))};
}

SmReport concentration_sm_check(std::size_t p, std::size_t q, const EntryLaw& law, double t, double C,
                                std::size_t reps, std::uint64_t seed) {
  if (p < 1 || q < 1) throw Error(Errc::InvalidDims, "p and q must be positive");
  SmReport out;
  out.reps = reps;
  const double half = C * (std::sqrt(static_cast<double>(q)) + t);
  out.lower = std::sqrt(static_cast<double>(p)) - half;
  out.upper = std::sqrt(static_cast<double>(p)) + half;
  out.min_sq = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < reps; ++r) {
    const auto [s1, sq] = extreme_singular_values(p, q, law, rng::derive_seed(seed, r));
    out.max_s1 = std::max(out.max_s1, s1);
    out.min_sq = std::min(out.min_sq, sq);
    if (s1 > out.upper || sq < out.lower || s1 < out.lower || sq > out.upper) ++out.violations;
  }
  out.rate = reps ? static_cast<double>(out.violations) / static_cast<double>(reps) : 0.0;
  return out;
}

double hw_exponent(double t, std::size_t p, double op_norm) {
  if (op_norm <= 0.0) return std::numeric_limits<double>::infinity();
  return std::min(t * t / (static_cast<double>(p) * op_norm * op_norm), t / op_norm);
}

namespace {

double fit_c(const std::vector<double>& t_grid, const std::vector<double>& tail, std::size_t p, double norm) {
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (tail[i] <= 0.0 || t_grid[i] <= 0.0) continue;
    const double h = hw_exponent(t_grid[i], p, norm);
    c = std::min(c, std::log(2.0 / tail[i]) / h);
  }
  return c;
}

double log_slope(const std::vector<double>& t_grid, const std::vector<double>& tail) {
  std::vector<double> xs, ys;
  for (std::size_t i = t_grid.size() / 2; i < t_grid.size(); ++i) {
    if (tail[i] > 0.0) {
      xs.push_back(t_grid[i]);
      ys.push_back(std::log(tail[i]));
    }
  }
  if (xs.size() < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

double operator_norm(const Matrix& C) {
  const Vector sv = sym_eigenvalues(Matrix(C.transpose() * C));
  return std::sqrt(std::max(0.0, sv(0)));
}

HwReport hw_report_from_samples(std::size_t p, double op_norm, const std::vector<double>& t_grid,
                                const std::vector<double>& quadratic, const std::vector<double>& bilinear) {
  HwReport out;
  out.reps = quadratic.size();
  out.t_grid = t_grid;
  out.op_norm = op_norm;
  const double dr = static_cast<double>(std::max<std::size_t>(out.reps, 1));
  for (double t : t_grid) {
    const auto hq = std::count_if(quadratic.begin(), quadratic.end(), [t](double v) { return v >= t; });
    const auto hb = std::count_if(bilinear.begin(), bilinear.end(), [t](double v) { return v >= t; });
    out.tail_quadratic.push_back(static_cast<double>(hq) / dr);
    out.tail_bilinear.push_back(static_cast<double>(hb) / dr);
  }
  out.fitted_c_quadratic = fit_c(t_grid, out.tail_quadratic, p, op_norm);
  out.fitted_c_bilinear = fit_c(t_grid, out.tail_bilinear, p, op_norm);
  out.slope_quadratic = log_slope(t_grid, out.tail_quadratic);
  out.slope_bilinear = log_slope(t_grid, out.tail_bilinear);
  return out;
}

HwReport concentration_hw_check(std::size_t p, const EntryLaw& law, const Matrix& C,
                                const std::vector<double>& t_grid, std::size_t reps, std::uint64_t seed) {
  if (static_cast<std::size_t>(C.rows()) != p || static_cast<std::size_t>(C.cols()) != p)
    throw Error(Errc::InvalidDims, "C must be p x p");
  std::vector<double> quad(reps), bil(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto forms = hw_forms(C, law, rng::derive_seed(seed, r));
    quad[r] = forms.first;
    bil[r] = forms.second;
  }
  return hw_report_from_samples(p, operator_norm(C), t_grid, quad, bil);
}

}  // namespace spikedeig
