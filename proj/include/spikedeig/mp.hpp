#pragma once

#include <cstddef>
#include <utility>

#include "spikedeig/types.hpp"

namespace spikedeig {

struct MPParams {
  double gamma = 1.0;
  explicit MPParams(double g);
  // ((1 - sqrt g)^2, (1 + sqrt g)^2), recomputed on every call.
  std::pair<double, double> edges() const;
};

std::pair<double, double> mp_edges(double gamma);

// Marchenko-Pastur density with ratio gamma; 0 outside [a, b] and at x <= 0.
double mp_density(double x, double gamma);

// Real Stieltjes transform m(z) = int p(x) / (z - x) dx right of the bulk,
// the root of gamma z m^2 - m (z + gamma - 1) + 1 = 0 that vanishes at
// infinity. z = b is allowed (discriminant clamped at 0); z below the edge
// throws InsideBulk.
double mp_stieltjes(double z, double gamma);

// gamma z m^2 - m (z + gamma - 1) + 1.
double mp_quadratic_residual(double z, double gamma, double m);

// (1/(N-M)) sum_i 1/(z - m_i). Throws InsideSpectrum unless z > max m_i.
double empirical_stieltjes(const Vector& M_diag, double z, std::size_t N, std::size_t M);

// l (1 + gamma/(l - 1)). Throws SpikeAtOne when l <= 1 + 1e-12.
double spike_forward_map(double l, double gamma);

// sqrt(n) (1/(l - 1) - (1/(N-M)) sum m_i/(lbar - m_i)) with
// lbar = spike_forward_map(l, (N-M)/n). Throws NotInvertible unless
// lbar > max m_i.
double inversion_gap(const Vector& M_diag, double l_nu, std::size_t N, std::size_t M, std::size_t n);

}  // namespace spikedeig
