#include <cmath>

#include <gtest/gtest.h>

#include "spikedeig/concentration.hpp"
#include "spikedeig/errors.hpp"

using namespace spikedeig;

TEST(SingularValues, ScalarCaseTail) {
  // p = q = 1: s_1 = |z|, violation iff |z| leaves [1 - 2(1+3), 1 + 8].
  const SmReport r = concentration_sm_check(1, 1, EntryLaw::gaussian(), 3.0, 2.0, 10000, 5);
  EXPECT_LE(r.rate, 0.01);
}

TEST(SingularValues, DegenerateBand) {
  const SmReport r = concentration_sm_check(20, 5, EntryLaw::gaussian(), 0.0, 0.0, 50, 6);
  EXPECT_EQ(r.rate, 1.0);
}

TEST(SingularValues, WideMatrixHasZeroSmallest) {
  const auto [s1, sq] = extreme_singular_values(3, 5, EntryLaw::gaussian(), 1);
  EXPECT_GT(s1, 0.0);
  EXPECT_EQ(sq, 0.0);
  EXPECT_THROW(extreme_singular_values(0, 5, EntryLaw::gaussian(), 1), Error);
}

TEST(HansonWright, ZeroMatrixHasNoTail) {
  const HwReport r = concentration_hw_check(10, EntryLaw::gaussian(), Matrix::Zero(10, 10), {0.5, 1, 2}, 200, 3);
  for (double t : r.tail_quadratic) EXPECT_EQ(t, 0.0);
  for (double t : r.tail_bilinear) EXPECT_EQ(t, 0.0);
}

TEST(HansonWright, TailsDecayAndFitPositive) {
  const std::vector<double> grid{2, 5, 10, 15, 20, 30};
  const HwReport r = concentration_hw_check(50, EntryLaw::gaussian(), Matrix::Identity(50, 50), grid, 5000, 4);
  EXPECT_NEAR(r.op_norm, 1.0, 1e-12);
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_LE(r.tail_quadratic[i], r.tail_quadratic[i - 1]);
  EXPECT_GT(r.fitted_c_quadratic, 0.0);
  EXPECT_GT(r.fitted_c_bilinear, 0.0);
  EXPECT_THROW(concentration_hw_check(5, EntryLaw::gaussian(), Matrix::Identity(4, 4), grid, 10, 1), Error);
}

TEST(HansonWright, Exponent) {
  EXPECT_DOUBLE_EQ(hw_exponent(2.0, 4, 1.0), 1.0);   // min(4/4, 2)
  EXPECT_DOUBLE_EQ(hw_exponent(10.0, 4, 1.0), 10.0);  // min(25, 10)
}
