#pragma once

// Internal building blocks of the symmetric eigensolver. The Householder
// reduction itself comes from Eigen::Tridiagonalization.

#include <Eigen/Dense>

namespace spikedeig::detail {

// Implicit-shift QL on the tridiagonal (d, e), e(i) coupling i and i + 1.
// On return d holds the eigenvalues in the order the iteration leaves them;
// when z is non-null its columns receive the accumulated rotations (pass Q to
// get eigenvectors of the original matrix).
// Throws Error(NoConvergence) after 60 sweeps on a single eigenvalue.
void tridiagonal_ql(Eigen::VectorXd& d, Eigen::VectorXd e, Eigen::MatrixXd* z);

// Eigenvectors of the tridiagonal matrix for the given eigenvalues by inverse
// iteration, reorthogonalized inside clusters. Columns are unit vectors.
Eigen::MatrixXd tridiagonal_eigenvectors(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                                         const Eigen::VectorXd& values);

}  // namespace spikedeig::detail
