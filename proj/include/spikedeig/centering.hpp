#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "spikedeig/block.hpp"
#include "spikedeig/model.hpp"
#include "spikedeig/types.hpp"

namespace spikedeig {

using Poly = std::vector<double>;          // ascending coefficients
using MatrixPoly = std::vector<Matrix>;    // ascending matrix coefficients

Poly poly_multiply(const Poly& p, const Poly& q, std::size_t max_degree);
double poly_eval(const Poly& p, double z);

// floor(8 ln n / ln(n / M)); a relative 1e-12 guard keeps exact ratios such
// as M = sqrt(n) from rounding down. Throws InvalidDims unless 1 <= M < n.
std::size_t truncation_order(std::size_t n, std::size_t M);

// Coefficients of
//   M_nu(z) = sum_{j=0}^{s} n^{-(j+1)} L^{1/2} (A + z B)^j R L^{1/2} 1 1^T,
// A = -R L^{1/2} 1 1^T L^{1/2}, B = n l_nu R, R = diag(1/(l_k - l_nu)) with
// 0 at nu. Throws NotSeparated when some l_k is within 1e-12 l_nu of l_nu.
MatrixPoly matrix_polynomial_Mnu(const std::vector<double>& spikes, std::size_t nu, std::size_t n, std::size_t s);

struct AbcCoefficients {
  Poly a, b, c;  // each of length 2s + 1
};

//   a(z) = -sum_{k != nu} M_{k nu}(z)
//   b(z) = -n l_nu (M^T L^{-1} M)_{nu nu}
//   c(z) = n (M^T M)_{nu nu} + (M^T 1 1^T M)_{nu nu}
AbcCoefficients abc_coefficients(const MatrixPoly& poly, const std::vector<double>& spikes, std::size_t nu,
                                 std::size_t n);

struct OCoefficients {
  double O_bar = 0.0;
  std::vector<double> O_j;  // O_j[j - 1] multiplies x^j, j = 1..2s^2 + 2s
};

// Expands sum_{j=0}^{s} P Q^j with P = 2a + b + c and Q = b, capped at
// degree 2s^2 + 2s.
OCoefficients compose_O(const Poly& a, const Poly& b, const Poly& c, std::size_t s);

struct PolynomialCoefficients {
  std::size_t s = 0;
  std::size_t n = 0;
  std::size_t M = 0;
  std::size_t nu = 1;
  Poly a, b, c;
  double O_bar = 0.0;
  std::vector<double> O_j;
};

// Full chain for one (spikes, nu, n): s, M_nu(z), (a, b, c), (O_bar, O_j).
PolynomialCoefficients polynomial_coefficients(const std::vector<double>& spikes, std::size_t nu, std::size_t n);

// Soft size check |O_bar| <= C M/n and |O_j| <= C^{j+1} M/n. Returns one
// message per violated bound; callers decide whether to warn.
std::vector<std::string> coefficient_bound_warnings(const PolynomialCoefficients& coeffs, double C);

double x_polynomial(const PolynomialCoefficients& coeffs, double x);  // O_bar + sum O_j x^j

struct XRoot {
  double x = 0.0;
  double residual = 0.0;
  std::string method;  // "fixed_point" or "bisection"
  int iterations = 0;
};

// Root of x = O_bar + sum O_j x^j: fixed point from 0 when the contraction
// heuristic holds, bracketed bisection over |y| <= 10 max(|O_bar|, M/n)
// otherwise. Throws NoRoot if the bracket has no sign change.
XRoot solve_x(const PolynomialCoefficients& coeffs);

// (k0 - 1) substitution steps from 0; k0 = 1 gives 0.
double iterate_x_expansion(const PolynomialCoefficients& coeffs, std::size_t k0);

// (1/n) sum_i m_i / (l_hat - m_i). Throws NotInvertible unless l_hat > max m_i.
double trace_centering(const Vector& M_diag, double l_hat_nu, std::size_t n);

// (1/n) sum_{k != nu} l_k / (l_k - l_nu) over sample eigenvalues.
double statistical_centering(const std::vector<double>& l_hat, std::size_t nu, std::size_t n);

// (N - M) / (n (l_nu - 1)). Throws SpikeAtOne when l_nu <= 1 + 1e-12.
double oracle_centering(double l_nu, std::size_t N, std::size_t M, std::size_t n);

enum class CltMode { Mixed, Statistical, Oracle };

struct XMode {
  enum class Kind { Root, Iterated, Zero };
  Kind kind = Kind::Zero;
  std::size_t k0 = 1;
  std::string to_string() const;
};

// "root", "zero" or "iter:<k0>".
XMode parse_x_mode(const std::string& text);
CltMode parse_clt_mode(const std::string& text);
std::string to_string(CltMode mode);

// Zero when M <= sqrt(n)/4, root otherwise.
XMode default_x_mode(std::size_t n, std::size_t M);

// Value of x under the chosen mode (0 for Zero).
double shift_for_mode(const PolynomialCoefficients& coeffs, const XMode& mode);

struct CenteringBundle {
  double c_tr = 0.0;
  double stat_sum = 0.0;
  double oracle = 0.0;
  double x = 0.0;
  double x_tilde = 0.0;
  double scale = 0.0;  // sqrt(n / (E z^4 - 1))
};

double centering_for_mode(const CenteringBundle& bundle, CltMode mode);

// sqrt(n / (E z^4 - 1)) (l_hat / l - 1 - centering).
double clt_statistic(double l_hat_nu, double l_nu, const CenteringBundle& bundle, CltMode mode);

// Every centering of one instance from the top-M sample eigenvalues and the
// bulk spectrum. x and x_tilde are supplied by the caller since they depend
// only on (spikes, nu, n).
CenteringBundle centering_bundle(const std::vector<double>& l_hat, const Vector& M_diag,
                                 const std::vector<double>& spikes, std::size_t nu, std::size_t n,
                                 std::size_t N, const EntryLaw& law, double x, double x_tilde);

// Convenience wrapper over a block decomposition and alignment.
double clt_statistics(const BlockDecomposition& bd, const Alignment& al, const std::vector<double>& l_hat,
                      const EntryLaw& law, CltMode mode, double x);

struct SeriesReport {
  double residual_alignment = 0.0;  // max_k |(a - e)_k - (|a - e|^2/2 - 1) Sigma_0k|
  double residual_sigma3 = 0.0;     // |Sigma3 - Sigma0 / (1 + Sigma0)|
  double decay_ratio = 0.0;         // |term_J| / |term_{J-1}|
  double norm_M = 0.0;              // spectral norm of M_nu
};

// D_nu = S_AA - L + L^{1/2} T^T M (l I - M)^{-1} T L^{1/2}.
Matrix d_matrix(const BlockDecomposition& bd, double l_hat);

// Neumann-series identities for a - e with M_nu = R D - (l_hat - l_nu) R.
// Throws SeriesDiverges when ||M_nu|| >= 1.
SeriesReport series_expansion_check(const Matrix& D, const Vector& a, double l_hat,
                                    const std::vector<double>& spikes, std::size_t nu, std::size_t J);
SeriesReport series_expansion_check(const BlockDecomposition& bd, const Alignment& al,
                                    const std::vector<double>& spikes, std::size_t nu, std::size_t J);

}  // namespace spikedeig
