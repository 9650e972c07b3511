#pragma once

#include <cstddef>

#include "spikedeig/types.hpp"

namespace spikedeig {

struct EigenSystem {
  Vector values;   // non-increasing
  Matrix vectors;  // columns are unit eigenvectors (may hold only the top k)
};

// Full eigendecomposition of a symmetric matrix: Householder
// tridiagonalization followed by implicit-shift QL with accumulated
// rotations. Ties keep the order in which QL leaves them; each eigenvector is
// signed so that its first largest-magnitude component is positive.
// Throws NotSymmetric (relative asymmetry above 1e-12) or NoConvergence.
EigenSystem sym_eigen(const Matrix& a);

// Eigenvalues only, non-increasing.
Vector sym_eigenvalues(const Matrix& a);

// The k largest eigenpairs. Uses QL for the values and inverse iteration on
// the tridiagonal form for the vectors, so the cost beyond the reduction is
// O(N k) plus one back-transformation.
EigenSystem sym_eigen_top(const Matrix& a, std::size_t k);

// (1/n) X X^T, exactly symmetric.
Matrix sample_covariance(const Matrix& x);

// max |P^T P - I| over the first `count` columns of `vectors`.
double orthonormality_residual(const Matrix& vectors, std::size_t count);

// max_i ||A v_i - lambda_i v_i||_2 over the stored pairs.
double eigenpair_residual(const Matrix& a, const EigenSystem& eig);

}  // namespace spikedeig
