#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "spikedeig/spectral.hpp"
#include "spikedeig/types.hpp"

namespace spikedeig {

// Split of S_n in the population eigenbasis into spike (A, first M
// coordinates) and bulk (B) blocks:
//   S_AA = (1/n) L^{1/2} Z_A Z_A^T L^{1/2},  S_AB = (1/n) L^{1/2} Z_A Z_B^T,
//   S_BB = (1/n) Z_B Z_B^T = V diag(M_diag) V^T,
//   (1/sqrt n) Z_B = V diag(sqrt M_diag) H^T,  T = (1/sqrt n) H^T Z_A^T.
struct BlockDecomposition {
  std::size_t n = 0, N = 0, M = 0;
  Matrix S_AA, S_AB, S_BB;
  Vector M_diag;  // non-increasing, clamped at 0
  Matrix V;       // (N-M) x (N-M)
  Matrix H;       // n x (N-M)
  Matrix T;       // (N-M) x M
  Matrix Z_A;     // M x n
  Vector spikes;
};

// H comes from the Gram eigendecomposition of S_BB: column i is
// Z_B^T v_i / sqrt(n m_i). When N-M > n the trailing N-M-n columns are zero;
// columns belonging to numerically null m_i inside the first min(n, N-M) are
// completed to an orthonormal set. Throws DegenerateSVD if the
// eigendecomposition fails.
BlockDecomposition block_decompose(const Matrix& Z, const std::vector<double>& spikes);

struct Alignment {
  std::size_t nu = 1;
  double l_hat = 0.0;
  Vector a;                  // unit, length M
  double R = 0.0;            // ||p_B||
  double inner = 0.0;        // <p_nu, u_nu> >= 0
  double one_minus_inner_sq = 0.0;  // 1 - inner^2 without cancellation
  Vector p_A, p_B;
  bool flagged = false;      // |inner| <= 1e-12 before the sign convention
};

// Alignment of the nu-th (1-based) sample eigenvector with the spike block.
// `p` is expressed in population coordinates first (U^T p for a non-identity
// basis). Throws DegenerateAlignment when ||p_A|| <= 1e-12.
Alignment alignment(const EigenSystem& eig, const std::optional<Matrix>& basis, std::size_t M, std::size_t nu);

// Same, from a single eigenvector already in population coordinates.
Alignment alignment_from_vector(const Vector& p, double l_hat, std::size_t M, std::size_t nu);

// L^{1/2} T^T g(M) T L^{1/2} for g(m) = m / (l - m)^power.
Matrix resolvent_form(const BlockDecomposition& bd, double l_hat, int power);

struct MasterResiduals {
  double r4 = 0.0;
  double r5 = 0.0;
  double r5_scale = 0.0;  // R^2 / (1 - R^2)
};

// Residuals of the two exact eigen-equations of the A-block:
//   (S_AA + L^{1/2} T^T M (l I - M)^{-1} T L^{1/2}) a = l a,
//   a^T L^{1/2} T^T M (l I - M)^{-2} T L^{1/2} a = R^2 / (1 - R^2).
// Throws NotInvertible unless l_hat > max(M_diag).
MasterResiduals verify_master_identities(const BlockDecomposition& bd, const Alignment& al);

}  // namespace spikedeig
