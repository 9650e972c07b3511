#include "spikedeig/block.hpp"

#include <algorithm>
#include <cmath>

#include "spikedeig/errors.hpp"

namespace spikedeig {

BlockDecomposition block_decompose(const Matrix& Z, const std::vector<double>& spikes) {
  const std::size_t N = Z.rows(), n = Z.cols(), M = spikes.size();
  if (M >= N) throw Error(Errc::InvalidDims, "block_decompose needs M < N");
  if (n < 1) throw Error(Errc::InvalidDims, "block_decompose needs n >= 1");
  const std::size_t nb = N - M;
  const double inv_n = 1.0 / static_cast<double>(n);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

  BlockDecomposition bd;
  bd.n = n;
  bd.N = N;
  bd.M = M;
  bd.spikes = Eigen::Map<const Vector>(spikes.data(), M);
  const Vector root = bd.spikes.cwiseSqrt();
  bd.Z_A = Z.topRows(M);
  const auto Z_B = Z.bottomRows(nb);

  const Matrix LZ_A = root.asDiagonal() * bd.Z_A;
  bd.S_AA = inv_n * LZ_A * LZ_A.transpose();
  bd.S_AB = inv_n * LZ_A * Z_B.transpose();
  bd.S_BB = inv_n * Z_B * Z_B.transpose();
  bd.S_BB = 0.5 * (bd.S_BB + bd.S_BB.transpose()).eval();

  EigenSystem eb;
  try {
    eb = sym_eigen(bd.S_BB);
  } catch (const Error& e) {
    throw Error(Errc::DegenerateSVD, std::string("bulk Gram eigendecomposition failed: ") + e.what());
  }
  bd.M_diag = eb.values.cwiseMax(0.0);
  bd.V = std::move(eb.vectors);

  // Right singular vectors of (1/sqrt n) Z_B.
  bd.H = Matrix::Zero(n, nb);
  const std::size_t rank_cap = std::min(n, nb);
  const double null_tol = 1e-12 * std::max(1.0, bd.M_diag.size() ? bd.M_diag(0) : 0.0);
  const Matrix ZtV = Z_B.transpose() * bd.V.leftCols(rank_cap);
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < rank_cap; ++i) {
    if (bd.M_diag(i) > null_tol) {
      bd.H.col(i) = ZtV.col(i) * (inv_sqrt_n / std::sqrt(bd.M_diag(i)));
    } else {
      missing.push_back(i);
    }
  }
  // Complete null directions with Gram-Schmidt over the canonical basis.
  std::size_t probe = 0;
  for (std::size_t i : missing) {
    for (; probe < n; ++probe) {
      Vector v = Vector::Unit(n, probe);
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t j = 0; j < rank_cap; ++j) v -= bd.H.col(j).dot(v) * bd.H.col(j);
      const double nv = v.norm();
      if (nv > 1e-6) {
        bd.H.col(i) = v / nv;
        ++probe;
        break;
      }
    }
  }

  bd.T = inv_sqrt_n * bd.H.transpose() * bd.Z_A.transpose();
  return bd;
}

Alignment alignment_from_vector(const Vector& p, double l_hat, std::size_t M, std::size_t nu) {
  if (nu < 1 || nu > M) throw Error(Errc::IndexOutOfRange, "nu must lie in 1..M");
  if (static_cast<std::size_t>(p.size()) <= M) throw Error(Errc::InvalidDims, "eigenvector shorter than M + 1");
  Alignment al;
  al.nu = nu;
  al.l_hat = l_hat;
  al.p_A = p.head(M);
  al.p_B = p.tail(p.size() - M);
  const double na = al.p_A.norm();
  if (na <= 1e-12) throw Error(Errc::DegenerateAlignment, "||p_A|| <= 1e-12");
  double inner = al.p_A(nu - 1);
  al.flagged = std::abs(inner) <= 1e-12;
  if (inner < 0) {
    al.p_A = -al.p_A;
    al.p_B = -al.p_B;
    inner = -inner;
  }
  al.inner = inner;
  al.R = al.p_B.norm();
  al.a = al.p_A / na;
  double off = al.p_B.squaredNorm();
  for (std::size_t k = 0; k < M; ++k)
    if (k != nu - 1) off += al.p_A(k) * al.p_A(k);
  // Rescale by ||p||^2 so a slightly non-unit vector still gives 1 - inner^2.
  al.one_minus_inner_sq = off / p.squaredNorm();
  return al;
}

Alignment alignment(const EigenSystem& eig, const std::optional<Matrix>& basis, std::size_t M, std::size_t nu) {
  if (nu < 1 || nu > static_cast<std::size_t>(eig.vectors.cols()))
    throw Error(Errc::IndexOutOfRange, "nu exceeds the stored eigenvectors");
  Vector p = eig.vectors.col(nu - 1);
  if (basis) p = basis->transpose() * p;
  return alignment_from_vector(p, eig.values(nu - 1), M, nu);
}

Matrix resolvent_form(const BlockDecomposition& bd, double l_hat, int power) {
  const double top = bd.M_diag.size() ? bd.M_diag(0) : 0.0;
  if (!(l_hat > top)) throw Error(Errc::NotInvertible, "l_hat must exceed max(M_diag)");
  Vector g(bd.M_diag.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double m = bd.M_diag(i);
    g(i) = m / std::pow(l_hat - m, power);
  }
  const Vector root = bd.spikes.cwiseSqrt();
  const Matrix TL = bd.T * root.asDiagonal();
  return TL.transpose() * g.asDiagonal() * TL;
}

MasterResiduals verify_master_identities(const BlockDecomposition& bd, const Alignment& al) {
  const Matrix K1 = resolvent_form(bd, al.l_hat, 1);
  const Matrix K2 = resolvent_form(bd, al.l_hat, 2);
  MasterResiduals out;
  out.r4 = ((bd.S_AA + K1) * al.a - al.l_hat * al.a).norm();
  const double R2 = al.R * al.R;
  out.r5_scale = R2 / (1.0 - R2);
  out.r5 = std::abs(al.a.dot(K2 * al.a) - out.r5_scale);
  return out;
}

}  // namespace spikedeig
