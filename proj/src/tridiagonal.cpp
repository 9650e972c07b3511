#include "tridiagonal.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "spikedeig/errors.hpp"

namespace spikedeig::detail {

void tridiagonal_ql(Eigen::VectorXd& d, Eigen::VectorXd e, Eigen::MatrixXd* z) {
  const Eigen::Index n = d.size();
  if (n <= 1) return;
  e.conservativeResize(n);
  e(n - 1) = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  const Eigen::Index rows = z ? z->rows() : 0;
  double f = 0.0;
  double tst1 = 0.0;
  for (Eigen::Index l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d(l)) + std::abs(e(l)));
    Eigen::Index m = l;
    while (m < n - 1 && std::abs(e(m)) > eps * tst1) ++m;
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 60) throw Error(Errc::NoConvergence, "QL iteration budget exceeded");
        // Wilkinson-type shift from the leading 2x2 block.
        double g = d(l);
        double p = (d(l + 1) - g) / (2.0 * e(l));
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d(l) = e(l) / (p + r);
        d(l + 1) = e(l) * (p + r);
        const double dl1 = d(l + 1);
        double h = g - d(l);
        for (Eigen::Index i = l + 2; i < n; ++i) d(i) -= h;
        f += h;

        p = d(m);
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e(l + 1);
        double s = 0.0, s2 = 0.0;
        for (Eigen::Index i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e(i);
          h = c * p;
          r = std::hypot(p, e(i));
          e(i + 1) = s * r;
          s = e(i) / r;
          c = p / r;
          p = c * d(i) - s * g;
          d(i + 1) = h + s * (c * g + s * d(i));
          if (z) {
            double* zi = z->col(i).data();
            double* zj = z->col(i + 1).data();
            for (Eigen::Index k = 0; k < rows; ++k) {
              const double t = zj[k];
              zj[k] = s * zi[k] + c * t;
              zi[k] = c * zi[k] - s * t;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e(l) / dl1;
        e(l) = s * p;
        d(l) = c * p;
      } while (std::abs(e(l)) > eps * tst1);
    }
    d(l) += f;
    e(l) = 0.0;
  }
}

namespace {

// LU factorization with partial pivoting of a tridiagonal matrix, kept in the
// layout of LAPACK's dgttrf: unit lower factor in `dl`, upper factor in
// (`dd`, `du`, `du2`).
struct TridiagonalLU {
  std::vector<double> dl, dd, du, du2;
  std::vector<char> swapped;

  TridiagonalLU(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double shift, double tiny) {
    const std::size_t n = diag.size();
    dd.resize(n);
    dl.assign(n > 0 ? n - 1 : 0, 0.0);
    du.assign(n > 0 ? n - 1 : 0, 0.0);
    du2.assign(n > 1 ? n - 2 : 0, 0.0);
    swapped.assign(n > 0 ? n - 1 : 0, 0);
    for (std::size_t i = 0; i < n; ++i) dd[i] = diag(i) - shift;
    for (std::size_t i = 0; i + 1 < n; ++i) dl[i] = du[i] = off(i);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(dd[i]) >= std::abs(dl[i])) {
        if (dd[i] == 0.0) dd[i] = tiny;
        const double fact = dl[i] / dd[i];
        dl[i] = fact;
        dd[i + 1] -= fact * du[i];
      } else {
        const double fact = dd[i] / dl[i];
        dd[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = dd[i + 1];
        dd[i + 1] = temp - fact * dd[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = 1;
      }
    }
    if (n > 0 && dd[n - 1] == 0.0) dd[n - 1] = tiny;
  }

  void solve(Eigen::VectorXd& b) const {
    const std::size_t n = dd.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!swapped[i]) {
        b(i + 1) -= dl[i] * b(i);
      } else {
        const double temp = b(i);
        b(i) = b(i + 1);
        b(i + 1) = temp - dl[i] * b(i);
      }
    }
    for (std::size_t k = n; k-- > 0;) {
      double acc = b(k);
      if (k + 1 < n) acc -= du[k] * b(k + 1);
      if (k + 2 < n) acc -= du2[k] * b(k + 2);
      b(k) = acc / dd[k];
    }
  }
};

}  // namespace

Eigen::MatrixXd tridiagonal_eigenvectors(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                                         const Eigen::VectorXd& values) {
  const Eigen::Index n = diag.size();
  const Eigen::Index k = values.size();
  Eigen::MatrixXd out(n, k);
  if (n == 1) {
    out.setOnes();
    return out;
  }
  double norm = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = std::abs(diag(i));
    if (i > 0) row += std::abs(offdiag(i - 1));
    if (i + 1 < n) row += std::abs(offdiag(i));
    norm = std::max(norm, row);
  }
  if (norm == 0.0) norm = 1.0;
  const double eps = std::numeric_limits<double>::epsilon();
  const double cluster_gap = 1e-3 * norm;
  const double tiny = eps * norm;

  for (Eigen::Index j = 0; j < k; ++j) {
    double shift = values(j);
    // Members of a cluster get slightly separated shifts so that their
    // inverse iterations do not collapse onto the same vector.
    std::vector<Eigen::Index> cluster;
    for (Eigen::Index i = 0; i < j; ++i)
      if (std::abs(values(i) - values(j)) <= cluster_gap) cluster.push_back(i);
    if (!cluster.empty()) shift += 10.0 * eps * norm * static_cast<double>(cluster.size());

    const TridiagonalLU lu(diag, offdiag, shift, tiny);
    // Deterministic, non-degenerate start vector.
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3 * j);
    x.normalize();
    for (int it = 0; it < 4; ++it) {
      lu.solve(x);
      for (Eigen::Index c : cluster) x -= out.col(c).dot(x) * out.col(c);
      const double nx = x.norm();
      if (!(nx > 0.0) || !std::isfinite(nx)) throw Error(Errc::NoConvergence, "inverse iteration broke down");
      x /= nx;
    }
    out.col(j) = x;
  }
  return out;
}

}  // namespace spikedeig::detail
