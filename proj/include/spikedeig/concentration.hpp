#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "spikedeig/model.hpp"
#include "spikedeig/types.hpp"

namespace spikedeig {

// Extreme singular values (s_1, s_q) of one p x q draw.
std::pair<double, double> extreme_singular_values(std::size_t p, std::size_t q, const EntryLaw& law,
                                                  std::uint64_t seed);

// (|y^T C y - tr C|, |y^T C y'|) for one pair of independent draws.
std::pair<double, double> hw_forms(const Matrix& C, const EntryLaw& law, std::uint64_t seed);

struct SmReport {
  std::size_t reps = 0;
  std::size_t violations = 0;
  double rate = 0.0;
  double lower = 0.0, upper = 0.0;  // sqrt p -/+ C (sqrt q + t)
  double max_s1 = 0.0, min_sq = 0.0;
};

// Fraction of p x q matrices with i.i.d. `law` entries whose extreme singular
// values leave [sqrt p - C(sqrt q + t), sqrt p + C(sqrt q + t)].
SmReport concentration_sm_check(std::size_t p, std::size_t q, const EntryLaw& law, double t, double C,
                                std::size_t reps, std::uint64_t seed);

struct HwReport {
  std::vector<double> t_grid;
  std::vector<double> tail_quadratic;  // P(|y^T C y - tr C| >= t)
  std::vector<double> tail_bilinear;   // P(|y^T C y'| >= t)
  double op_norm = 0.0;
  double fitted_c_quadratic = 0.0;     // largest c with tail <= 2 exp(-c h(t)) on the grid
  double fitted_c_bilinear = 0.0;
  double slope_quadratic = 0.0;        // d log tail / dt over the upper half of the grid
  double slope_bilinear = 0.0;
  std::size_t reps = 0;
};

// h(t) = min(t^2 / (p ||C||^2), t / ||C||).
double hw_exponent(double t, std::size_t p, double op_norm);

// Tail curves and fits from per-replicate |quadratic| and |bilinear| values.
HwReport hw_report_from_samples(std::size_t p, double op_norm, const std::vector<double>& t_grid,
                                const std::vector<double>& quadratic, const std::vector<double>& bilinear);

double operator_norm(const Matrix& C);

HwReport concentration_hw_check(std::size_t p, const EntryLaw& law, const Matrix& C,
                                const std::vector<double>& t_grid, std::size_t reps, std::uint64_t seed);

}  // namespace spikedeig
