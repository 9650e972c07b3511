#include "spikedeig/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "spikedeig/errors.hpp"
#include "tridiagonal.hpp"

namespace spikedeig {

namespace {

void require_symmetric(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(Errc::NotSymmetric, "matrix is not square");
  if (a.size() == 0) throw Error(Errc::InvalidDims, "empty matrix");
  const double scale = a.cwiseAbs().maxCoeff();
  double asym = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j) asym = std::max(asym, std::abs(a(i, j) - a(j, i)));
  if (!std::isfinite(scale)) throw Error(Errc::NotSymmetric, "matrix has non-finite entries");
  if (asym > 1e-12 * scale) throw Error(Errc::NotSymmetric, "asymmetry exceeds 1e-12 relative");
}

std::vector<Eigen::Index> descending_order(const Eigen::VectorXd& d) {
  std::vector<Eigen::Index> idx(d.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index i, Eigen::Index j) { return d(i) > d(j); });
  return idx;
}

template <class Col>
void fix_sign(Col v) {
  const double top = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= top - 1e-12 * top) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

struct Reduced {
  Eigen::Tridiagonalization<Eigen::MatrixXd> tri;
  Eigen::VectorXd diag;
  Eigen::VectorXd off;
};

void reduce(const Matrix& a, Reduced& r) {
  const Eigen::MatrixXd colmajor = a;
  r.tri.compute(colmajor);
  r.diag = r.tri.diagonal();
  r.off = r.tri.subDiagonal();
}

}  // namespace

EigenSystem sym_eigen(const Matrix& a) {
  require_symmetric(a);
  const Eigen::Index n = a.rows();
  Reduced r;
  reduce(a, r);
  Eigen::MatrixXd q = r.tri.matrixQ();
  Eigen::VectorXd d = r.diag;
  detail::tridiagonal_ql(d, r.off, &q);
  const auto order = descending_order(d);
  EigenSystem out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = d(order[j]);
    out.vectors.col(j) = q.col(order[j]);
    fix_sign(out.vectors.col(j));
  }
  return out;
}

Vector sym_eigenvalues(const Matrix& a) {
  require_symmetric(a);
  Reduced r;
  reduce(a, r);
  Eigen::VectorXd d = r.diag;
  detail::tridiagonal_ql(d, r.off, nullptr);
  std::sort(d.data(), d.data() + d.size(), std::greater<>());
  return d;
}

EigenSystem sym_eigen_top(const Matrix& a, std::size_t k) {
  require_symmetric(a);
  const Eigen::Index n = a.rows();
  if (k == 0 || static_cast<Eigen::Index>(k) > n) throw Error(Errc::InvalidDims, "k must lie in 1..N");
  Reduced r;
  reduce(a, r);
  Eigen::VectorXd d = r.diag;
  detail::tridiagonal_ql(d, r.off, nullptr);
  std::sort(d.data(), d.data() + d.size(), std::greater<>());
  EigenSystem out;
  out.values = d.head(k);
  Eigen::MatrixXd y = detail::tridiagonal_eigenvectors(r.diag, r.off, out.values);
  y.applyOnTheLeft(r.tri.matrixQ());
  out.vectors = y;
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(k); ++j) {
    auto v = out.vectors.col(j);
    v.normalize();
    fix_sign(v);
  }
  return out;
}

Matrix sample_covariance(const Matrix& x) {
  if (x.cols() < 1) throw Error(Errc::InvalidDims, "sample_covariance needs n >= 1");
  const Eigen::Index N = x.rows();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(N, N);
  s.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0 / static_cast<double>(x.cols()));
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
  return s;
}

double orthonormality_residual(const Matrix& vectors, std::size_t count) {
  const auto p = vectors.leftCols(count);
  const Matrix g = p.transpose() * p;
  return (g - Matrix::Identity(count, count)).cwiseAbs().maxCoeff();
}

double eigenpair_residual(const Matrix& a, const EigenSystem& eig) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < eig.vectors.cols(); ++j) {
    const Vector v = eig.vectors.col(j);
    worst = std::max(worst, (a * v - eig.values(j) * v).norm());
  }
  return worst;
}

}  // namespace spikedeig
