#include <cmath>

#include <gtest/gtest.h>

#include "spikedeig/errors.hpp"
#include "spikedeig/model.hpp"

using namespace spikedeig;

TEST(EntryLaw, FourthMoments) {
  EXPECT_DOUBLE_EQ(EntryLaw::gaussian().fourth_moment(), 3.0);
  EXPECT_DOUBLE_EQ(EntryLaw::uniform_scaled().fourth_moment(), 1.8);
  EXPECT_DOUBLE_EQ(EntryLaw::two_point(0.5).fourth_moment(), 1.0);
  for (double p : {0.05, 0.2, 0.5, 0.7, 0.95}) EXPECT_GE(EntryLaw::two_point(p).fourth_moment(), 1.0 - 1e-15);
  EXPECT_FALSE(EntryLaw::two_point(0.5).clt_eligible(0.1));
  EXPECT_TRUE(EntryLaw::two_point(0.2).clt_eligible(0.1));
}

TEST(EntryLaw, Psi2Bounds) {
  // Gaussian: E exp(z^2/t^2) = (1 - 2/t^2)^{-1/2} = 2 at t^2 = 8/3.
  EXPECT_NEAR(EntryLaw::gaussian().psi2_bound(), std::sqrt(8.0 / 3.0), 1e-12);
  // Rademacher: exp(1/t^2) = 2.
  EXPECT_NEAR(EntryLaw::two_point(0.5).psi2_bound(), 1.0 / std::sqrt(std::log(2.0)), 1e-9);
  const double u = EntryLaw::uniform_scaled().psi2_bound();
  EXPECT_GT(u, 1.0);
  EXPECT_LT(u, std::sqrt(8.0 / 3.0));
}

TEST(EntryLaw, Parsing) {
  EXPECT_EQ(parse_entry_law("gaussian"), EntryLaw::gaussian());
  EXPECT_EQ(parse_entry_law("rademacher"), EntryLaw::two_point(0.5));
  EXPECT_EQ(parse_entry_law("two_point:0.25"), EntryLaw::two_point(0.25));
  EXPECT_THROW(parse_entry_law("cauchy"), Error);
  EXPECT_THROW(parse_entry_law("two_point:1.5"), Error);
}

TEST(SpikeRule, Forms) {
  EXPECT_DOUBLE_EQ(parse_spike_rule("2*n^0.5").evaluate(100), 20.0);
  EXPECT_DOUBLE_EQ(parse_spike_rule("n^0.5").evaluate(100), 10.0);
  EXPECT_DOUBLE_EQ(parse_spike_rule("3*n").evaluate(100), 300.0);
  EXPECT_DOUBLE_EQ(parse_spike_rule("n").evaluate(7), 7.0);
  EXPECT_DOUBLE_EQ(parse_spike_rule(" 4.5 ").evaluate(7), 4.5);
  EXPECT_THROW(parse_spike_rule("n^"), Error);
  EXPECT_THROW(parse_spike_rule("x*n"), Error);
}

TEST(Spec, Validation) {
  SpikedModelSpec s;
  s.n = 10;
  s.N = 8;
  s.spikes = {4.0};
  EXPECT_NO_THROW(s.validate());
  s.spikes = {2.0, 4.0};
  EXPECT_THROW(s.validate(), Error);  // not descending
  s.spikes = {0.5};
  EXPECT_THROW(s.validate(), Error);
  s.spikes = {4.0};
  s.N = 1000;
  EXPECT_THROW(s.validate(), Error);  // outside the aspect-ratio bound
}

TEST(Sampling, DeterministicAndSupport) {
  EXPECT_EQ(sample_entry_matrix(2, 2, EntryLaw::gaussian(), 5), sample_entry_matrix(2, 2, EntryLaw::gaussian(), 5));
  const Matrix r = sample_entry_matrix(10, 10, EntryLaw::two_point(0.5), 3);
  for (Eigen::Index i = 0; i < r.size(); ++i) EXPECT_EQ(std::abs(r.data()[i]), 1.0);
  EXPECT_THROW(sample_entry_matrix(0, 3, EntryLaw::gaussian(), 1), Error);
}

TEST(Sampling, SubBlocksRegenerateIndependently) {
  const Matrix big = sample_entry_matrix(6, 5, EntryLaw::gaussian(), 8);
  const Matrix small = sample_entry_matrix(3, 5, EntryLaw::gaussian(), 8);
  EXPECT_EQ(Matrix(big.topRows(3)), small);
}

TEST(Sampling, LargeGaussianMoments) {
  const Matrix z = sample_entry_matrix(1000, 1000, EntryLaw::gaussian(), 2026);
  const double mean = z.mean();
  const double var = (z.array() - mean).square().sum() / (z.size() - 1);
  EXPECT_LE(std::abs(mean), 0.01);
  EXPECT_GE(var, 0.99);
  EXPECT_LE(var, 1.01);
}

TEST(Sampling, UniformAndTwoPointMoments) {
  for (const EntryLaw& law : {EntryLaw::uniform_scaled(), EntryLaw::two_point(0.2)}) {
    const Matrix z = sample_entry_matrix(500, 400, law, 4);
    EXPECT_NEAR(z.mean(), 0.0, 0.01);
    EXPECT_NEAR(z.array().square().mean(), 1.0, 0.02);
    EXPECT_NEAR(z.array().pow(4).mean(), law.fourth_moment(), 0.05 * law.fourth_moment());
  }
}

TEST(GenerateData, DiagonalScaling) {
  SpikedModelSpec s;
  s.n = 20;
  s.N = 10;
  s.spikes = {1.0, 1.0};
  DataSample d = generate_data(s, 3);
  EXPECT_EQ(d.X, d.Z);
  s.spikes = {4.0};
  d = generate_data(s, 3);
  EXPECT_EQ(Matrix(d.X.row(0)), Matrix(2.0 * d.Z.row(0)));
  EXPECT_EQ(Matrix(d.X.bottomRows(9)), Matrix(d.Z.bottomRows(9)));
}

TEST(GenerateData, SpikedRowVariance) {
  SpikedModelSpec s;
  s.n = 5000;
  s.N = 2500;
  s.spikes = {9.0};
  const DataSample d = generate_data(s, 77);
  const double var = d.X.row(0).squaredNorm() / s.n;
  EXPECT_GE(var, 8.5);
  EXPECT_LE(var, 9.5);
}

TEST(GenerateData, RotatedBasisPreservesCovarianceTrace) {
  SpikedModelSpec s;
  s.n = 50;
  s.N = 6;
  s.spikes = {5.0, 2.0};
  s.basis = random_orthogonal(6, 1);
  const double ortho = (s.basis->transpose() * *s.basis - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff();
  EXPECT_LT(ortho, 1e-13);
  EXPECT_NEAR(s.covariance().trace(), 11.0, 1e-12);
  const DataSample d = generate_data(s, 2);
  Matrix scaled = d.Z;
  scaled.row(0) *= std::sqrt(5.0);
  scaled.row(1) *= std::sqrt(2.0);
  EXPECT_LT((d.X - *s.basis * scaled).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Separation, Conventions) {
  EXPECT_TRUE(check_separation(std::vector<double>{10.0, 2.0}, 1, 0.5).separated);
  EXPECT_FALSE(check_separation(std::vector<double>{10.0, 9.0}, 1, 0.5).separated);
  EXPECT_TRUE(check_separation(std::vector<double>{100.0, 10.0, 1.5}, 2, 0.5).separated);
  EXPECT_FALSE(check_separation(std::vector<double>{100.0, 10.0, 1.2}, 3, 0.5).separated);  // 1.2 / 1 too close to the bulk
  EXPECT_THROW(check_separation(std::vector<double>{10.0}, 2, 0.5), Error);
}
