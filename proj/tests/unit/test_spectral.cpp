#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "spikedeig/errors.hpp"
#include "spikedeig/model.hpp"
#include "spikedeig/spectral.hpp"

using namespace spikedeig;

namespace {

Matrix random_symmetric(int n, std::uint64_t seed) {
  const Matrix g = sample_entry_matrix(n, n, EntryLaw::gaussian(), seed);
  return Matrix(0.5 * (g + g.transpose()));
}

}  // namespace

TEST(SymEigen, Diagonal) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 2;
  a(1, 1) = 3;
  const EigenSystem e = sym_eigen(a);
  EXPECT_DOUBLE_EQ(e.values(0), 3.0);
  EXPECT_DOUBLE_EQ(e.values(1), 2.0);
  EXPECT_DOUBLE_EQ(e.vectors(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(e.vectors(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(e.vectors(0, 0), 0.0);
}

TEST(SymEigen, SwapMatrix) {
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  const EigenSystem e = sym_eigen(a);
  EXPECT_NEAR(e.values(0), 1.0, 1e-15);
  EXPECT_NEAR(e.values(1), -1.0, 1e-15);
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(e.vectors(0, 0), h, 1e-15);
  EXPECT_NEAR(e.vectors(1, 0), h, 1e-15);
  // Sign rule: first largest-magnitude entry positive.
  EXPECT_NEAR(e.vectors(0, 1), h, 1e-15);
  EXPECT_NEAR(e.vectors(1, 1), -h, 1e-15);
}

TEST(SymEigen, ReconstructionAndOrthonormality) {
  const Matrix a = random_symmetric(50, 3);
  const EigenSystem e = sym_eigen(a);
  const Matrix rec = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
  EXPECT_LE((rec - a).cwiseAbs().maxCoeff(), 1e-8 * a.cwiseAbs().maxCoeff());
  EXPECT_LE(orthonormality_residual(e.vectors, 50), 1e-12);
  for (int k = 1; k < 50; ++k) EXPECT_GE(e.values(k - 1), e.values(k));
}

TEST(SymEigen, DeterministicBitwise) {
  const Matrix a = random_symmetric(40, 9);
  const EigenSystem x = sym_eigen(a), y = sym_eigen(a);
  EXPECT_EQ(x.values, y.values);
  EXPECT_EQ(x.vectors, y.vectors);
}

TEST(SymEigen, RejectsAsymmetric) {
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  EXPECT_THROW(sym_eigen(a), Error);
}

TEST(SymEigen, ValuesOnlyAndTopKAgree) {
  const Matrix a = random_symmetric(80, 4);
  const EigenSystem full = sym_eigen(a);
  const Vector vals = sym_eigenvalues(a);
  EXPECT_LE((vals - full.values).cwiseAbs().maxCoeff(), 1e-12);
  const EigenSystem top = sym_eigen_top(a, 5);
  ASSERT_EQ(top.vectors.cols(), 5);
  for (int k = 0; k < 5; ++k) {
    EXPECT_NEAR(top.values(k), full.values(k), 1e-12);
    EXPECT_NEAR(std::abs(top.vectors.col(k).dot(full.vectors.col(k))), 1.0, 1e-10);
  }
  EXPECT_LE(eigenpair_residual(a, top), 1e-10);
  EXPECT_LE(orthonormality_residual(top.vectors, 5), 1e-10);
}

TEST(SymEigen, TopKWithCloseEigenvalues) {
  // Clustered spectrum exercises re-orthogonalisation in inverse iteration.
  const Matrix q = random_orthogonal(30, 2);
  Vector d = Vector::LinSpaced(30, 0.0, 1.0);
  d(29) = 5.0;
  d(28) = 5.0 + 1e-10;
  d(27) = 5.0 - 1e-10;
  const Matrix a0 = q * d.asDiagonal() * q.transpose();
  const Matrix a = 0.5 * (a0 + a0.transpose());
  const EigenSystem top = sym_eigen_top(a, 3);
  EXPECT_LE(orthonormality_residual(top.vectors, 3), 1e-8);
  EXPECT_LE(eigenpair_residual(a, top), 1e-9);
}

TEST(SampleCovariance, Examples) {
  EXPECT_EQ(sample_covariance(Matrix::Identity(4, 4)), Matrix(0.25 * Matrix::Identity(4, 4)));
  Matrix x(2, 1);
  x << 3, 4;
  Matrix s(2, 2);
  s << 9, 12, 12, 16;
  EXPECT_EQ(sample_covariance(x), s);
  const Matrix r = sample_entry_matrix(7, 13, EntryLaw::gaussian(), 1);
  const Matrix c = sample_covariance(r);
  EXPECT_NEAR(c.trace(), r.squaredNorm() / 13.0, 1e-12 * c.trace());
  EXPECT_EQ(c, Matrix(c.transpose()));
}
