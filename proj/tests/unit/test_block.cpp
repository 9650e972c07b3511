#include <cmath>

#include <gtest/gtest.h>

#include "spikedeig/block.hpp"
#include "spikedeig/errors.hpp"
#include "spikedeig/model.hpp"
#include "spikedeig/rng.hpp"
#include "spikedeig/spectral.hpp"

using namespace spikedeig;

namespace {

struct Instance {
  SpikedModelSpec spec;
  DataSample data;
  EigenSystem eig;
  BlockDecomposition bd;
};

Instance make(std::size_t n, std::size_t N, std::vector<double> spikes, std::uint64_t seed) {
  Instance in;
  in.spec.n = n;
  in.spec.N = N;
  in.spec.spikes = std::move(spikes);
  in.data = generate_data(in.spec, seed);
  in.eig = sym_eigen(sample_covariance(in.data.X));
  in.bd = block_decompose(in.data.Z, in.spec.spikes);
  return in;
}

}  // namespace

TEST(Block, HandExample) {
  // One spike row of zeros followed by Z_B = [[3, 0], [0, 4]], n = 2.
  Matrix z(3, 2);
  z << 0, 0, 3, 0, 0, 4;
  const BlockDecomposition bd = block_decompose(z, {2.0});
  EXPECT_NEAR(bd.M_diag(0), 8.0, 1e-14);
  EXPECT_NEAR(bd.M_diag(1), 4.5, 1e-14);
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 4.5;
  expect(1, 1) = 8.0;
  EXPECT_LE((bd.S_BB - expect).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((bd.V * bd.M_diag.asDiagonal() * bd.V.transpose() - expect).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Block, Invariants) {
  const Instance in = make(60, 40, {30.0, 10.0}, 5);
  const auto& bd = in.bd;
  const std::size_t NB = 38;
  // (1/sqrt n) Z_B = V diag(sqrt m) H^T.
  const Matrix zb = in.data.Z.bottomRows(NB) / std::sqrt(60.0);
  const Matrix rec = bd.V * bd.M_diag.cwiseSqrt().asDiagonal() * bd.H.transpose();
  EXPECT_LE((rec - zb).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((bd.H.transpose() * bd.H - Matrix::Identity(NB, NB)).cwiseAbs().maxCoeff(), 1e-12);
  // S_AB from the data blocks.
  const Matrix sab = sample_covariance(in.data.X).topRightCorner(2, NB);
  EXPECT_LE((bd.S_AB - sab).cwiseAbs().maxCoeff(), 1e-12);
  // Bulk spectrum agrees with a direct eigendecomposition of S_BB.
  const Vector direct = sym_eigenvalues(bd.S_BB);
  EXPECT_LE((direct - bd.M_diag).cwiseAbs().maxCoeff(), 1e-8 * direct(0));
}

TEST(Block, PaddingWhenBulkExceedsSamples) {
  const Instance in = make(10, 15, {20.0}, 6);
  const std::size_t NB = 14;
  ASSERT_EQ(static_cast<std::size_t>(in.bd.H.cols()), NB);
  std::size_t zero_cols = 0;
  for (std::size_t j = 0; j < NB; ++j) zero_cols += in.bd.H.col(j).cwiseAbs().maxCoeff() == 0.0;
  EXPECT_EQ(zero_cols, NB - 10);
}

TEST(Alignment, Conventions) {
  Vector p = Vector::Zero(5);
  p(1) = 1.0;
  Alignment al = alignment_from_vector(p, 3.0, 3, 2);
  EXPECT_EQ(al.R, 0.0);
  EXPECT_EQ(al.inner, 1.0);
  EXPECT_EQ(al.a(1), 1.0);
  al = alignment_from_vector(-p, 3.0, 3, 2);
  EXPECT_EQ(al.inner, 1.0);
  Vector q = Vector::Zero(5);
  q(4) = 1.0;
  EXPECT_THROW(alignment_from_vector(q, 3.0, 3, 2), Error);
}

TEST(Alignment, ComplementIsStable) {
  Vector p = Vector::Zero(4);
  p(0) = std::sqrt(1.0 - 1e-20);
  p(3) = 1e-10;
  const Alignment al = alignment_from_vector(p, 2.0, 2, 1);
  EXPECT_NEAR(al.one_minus_inner_sq, 1e-20, 1e-30);
}

TEST(Alignment, DeskInstanceIsConsistent) {
  const double s = std::pow(500.0, 0.8);
  const Instance in = make(500, 400, {4 * s, 2 * s, s}, 12);
  for (std::size_t nu = 1; nu <= 3; ++nu) {
    const Alignment al = alignment(in.eig, std::nullopt, 3, nu);
    EXPECT_GT(al.inner * al.inner, 0.9);
  }
}

TEST(MasterIdentities, HoldOnSeparatedInstances) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double s = std::pow(400.0, 0.8);
    const Instance in = make(400, 300, {8 * s, 4 * s, 2 * s, s}, rng::derive_seed(99, seed));
    EXPECT_LE(orthonormality_residual(in.eig.vectors, 4), 1e-10);
    for (std::size_t nu = 1; nu <= 4; ++nu) {
      const Alignment al = alignment(in.eig, std::nullopt, 4, nu);
      const MasterResiduals r = verify_master_identities(in.bd, al);
      EXPECT_LE(r.r4, 1e-6 * al.l_hat);
      EXPECT_LE(r.r5, 1e-6 * (1 + r.r5_scale));
    }
  }
}

TEST(MasterIdentities, RankOneAndRotatedBasis) {
  SpikedModelSpec spec;
  spec.n = 200;
  spec.N = 100;
  spec.spikes = {50.0};
  spec.basis = random_orthogonal(100, 4);
  const DataSample d = generate_data(spec, 8);
  const EigenSystem eig = sym_eigen(sample_covariance(d.X));
  const BlockDecomposition bd = block_decompose(d.Z, spec.spikes);
  const Alignment al = alignment(eig, spec.basis, 1, 1);
  const MasterResiduals r = verify_master_identities(bd, al);
  EXPECT_LE(r.r4, 1e-6 * al.l_hat);
  EXPECT_LE(r.r5, 1e-6 * (1 + r.r5_scale));
  // Rank-one reduction: l_1 t^T M (l_hat - M)^{-2} t.
  const Vector t = bd.T.col(0);
  double lhs = 0.0;
  for (Eigen::Index i = 0; i < bd.M_diag.size(); ++i)
    lhs += t(i) * t(i) * bd.M_diag(i) / std::pow(al.l_hat - bd.M_diag(i), 2);
  lhs *= 50.0;
  EXPECT_NEAR(lhs, r.r5_scale, 1e-6 * (1 + r.r5_scale));
}

TEST(MasterIdentities, TinySpikeIsNotInvertible) {
  const Instance in = make(400, 300, {1.0, 1.0, 1.0}, 1);
  const Alignment al = alignment(in.eig, std::nullopt, 3, 3);
  ASSERT_LT(al.l_hat, in.bd.M_diag(0));
  EXPECT_THROW(verify_master_identities(in.bd, al), Error);
}
