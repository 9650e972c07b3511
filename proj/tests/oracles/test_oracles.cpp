#include <cmath>
#include <random>
#include <vector>

#include <gmpxx.h>
#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "oracles.hpp"
#include "spikedeig/centering.hpp"
#include "spikedeig/eigvec.hpp"
#include "spikedeig/mp.hpp"
#include "spikedeig/spectral.hpp"
#include "spikedeig/stats.hpp"

using namespace spikedeig;

namespace {

AbcCoefficients library_abc(const std::vector<double>& spikes, std::size_t nu, std::size_t n, std::size_t s) {
  return abc_coefficients(matrix_polynomial_Mnu(spikes, nu, n, s), spikes, nu, n);
}

oracle::Abc<mpq_class> exact_abc(const std::vector<double>& spikes, std::size_t nu, std::size_t n, std::size_t s) {
  std::vector<mpq_class> l;
  for (double x : spikes) l.emplace_back(x);  // doubles are exact rationals
  return oracle::naive_abc<mpq_class>(l, nu, mpq_class(static_cast<unsigned long>(n)), s);
}

// Largest relative deviation, each coefficient against its own magnitude.
template <typename T, typename Conv>
double max_rel(const std::vector<double>& got, const std::vector<T>& want, Conv to_d) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double w = to_d(want[i]);
    const double d = std::abs(got[i] - w);
    worst = std::max(worst, w == 0.0 ? d : d / std::abs(w));
  }
  return worst;
}

double q2d(const mpq_class& q) { return q.get_d(); }
double f2d(const oracle::f128& x) { return oracle::to_double(x); }

std::vector<double> geometric_spikes(std::size_t M, std::size_t n, double ratio) {
  std::vector<double> sp;
  for (std::size_t k = 0; k < M; ++k) sp.push_back(std::pow(static_cast<double>(n), 0.8) * std::pow(ratio, double(M - 1 - k)));
  return sp;
}

}  // namespace

TEST(ExactAbc, HandExampleMatchesRationalOracle) {
  const std::vector<double> l{10.0, 2.0};
  const auto lib = library_abc(l, 1, 100, 0);
  const auto ex = exact_abc(l, 1, 100, 0);
  EXPECT_EQ(ex.a[0], mpq_class(1, 400));
  EXPECT_EQ(ex.b[0], mpq_class(-1, 320));
  // c0 = n e^2 + e^2 with e = -1/400.
  EXPECT_EQ(ex.c[0], mpq_class(101, 160000));
  EXPECT_NEAR(lib.a[0], 0.0025, 1e-17);
  EXPECT_NEAR(lib.b[0], -0.003125, 1e-17);
  EXPECT_NEAR(lib.c[0], 101.0 / 160000.0, 1e-17);
}

TEST(ExactAbc, RandomSpikesOrderThree) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> l;
    double level = 500.0;
    for (int k = 0; k < 5; ++k) {
      l.push_back(level);
      level /= 1.5 + u(gen);
    }
    for (std::size_t nu = 1; nu <= 5; ++nu) {
      const auto lib = library_abc(l, nu, 300, 3);
      const auto ex = exact_abc(l, nu, 300, 3);
      EXPECT_LT(max_rel(lib.a, ex.a, q2d), 1e-12) << "rep " << rep << " nu " << nu;
      EXPECT_LT(max_rel(lib.b, ex.b, q2d), 1e-12) << "rep " << rep << " nu " << nu;
      EXPECT_LT(max_rel(lib.c, ex.c, q2d), 1e-12) << "rep " << rep << " nu " << nu;
    }
  }
}

TEST(WideAbc, FullTruncationOrderAtDeskSize) {
  const std::size_t n = 2000;
  for (std::size_t M : {5u, 10u, 20u}) {
    const auto sp = geometric_spikes(M, n, 2.0);
    const std::size_t s = truncation_order(n, M);
    for (std::size_t nu : {std::size_t(1), M / 2, M}) {
      const auto lib = library_abc(sp, nu, n, s);
      const auto ref = oracle::naive_abc_f128(sp, nu, n, s);
      EXPECT_LT(max_rel(lib.a, ref.a, f2d), 1e-12) << "M " << M << " nu " << nu;
      EXPECT_LT(max_rel(lib.b, ref.b, f2d), 1e-12) << "M " << M << " nu " << nu;
      EXPECT_LT(max_rel(lib.c, ref.c, f2d), 1e-12) << "M " << M << " nu " << nu;
    }
  }
}

TEST(ComposeO, EvaluationMatchesDirectSum) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> coef(-1.0, 1.0), zdist(-0.1, 0.1);
  const std::size_t s = 2;
  std::vector<double> a(2 * s + 1), b(2 * s + 1), c(2 * s + 1);
  for (auto* v : {&a, &b, &c})
    for (auto& x : *v) x = coef(gen);
  const OCoefficients o = compose_O(a, b, c, s);
  ASSERT_EQ(o.O_j.size(), 2 * s * s + 2 * s);
  for (int i = 0; i < 20; ++i) {
    const double z = zdist(gen);
    const auto series = oracle::o_series_eval(o.O_bar, o.O_j, z);
    const oracle::f128 direct = oracle::compose_eval(a, b, c, s, z);
    EXPECT_LE(oracle::to_double(oracle::abs128(series.value - direct)),
              1e-12 * oracle::to_double(oracle::abs128(direct)))
        << "z = " << z;
  }
}

TEST(SolveX, AgreesWithHighPrecisionNewton) {
  const std::size_t n = 2000, M = 20;
  const auto sp = geometric_spikes(M, n, 2.0);
  for (std::size_t nu : {std::size_t(1), std::size_t(7), M}) {
    const PolynomialCoefficients pc = polynomial_coefficients(sp, nu, n);
    const XRoot root = solve_x(pc);
    EXPECT_LE(root.residual, 1e-13);
    const oracle::big ref = oracle::newton_root(pc.O_bar, pc.O_j, oracle::big(0));
    const double x_ref = static_cast<double>(ref);
    EXPECT_LE(std::abs(root.x - x_ref), 1e-12 * std::abs(x_ref)) << "nu " << nu;
  }
}

TEST(MpStieltjes, MatchesQuadratureOfDensity) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (double gamma : {0.25, 0.5, 1.0}) {
    const auto [lo, hi] = mp_edges(gamma);
    for (double z : {hi + 0.5, hi + 2.0, 4.0 * hi}) {
      const double ref =
          integrator.integrate([&](double x) { return mp_density(x, gamma) / (z - x); }, std::max(lo, 1e-300), hi);
      EXPECT_NEAR(mp_stieltjes(z, gamma), ref, 1e-6) << "gamma " << gamma << " z " << z;
    }
  }
  EXPECT_NEAR(mp_stieltjes(4.0, 0.5), (3.5 - std::sqrt(4.25)) / 4.0, 1e-12);
}

TEST(ChiMixture, MomentsMatchCumulantRecursion) {
  const std::vector<std::vector<double>> weights{{1.0}, {1.0, 1.0}, {2.0, 3.0}, {0.3, 0.1, 1.7, 0.05}};
  for (const auto& c : weights)
    for (unsigned m = 1; m <= 6; ++m) {
      const double ref = oracle::chi_mixture_moment_cumulant(c, m);
      EXPECT_NEAR(chi_mixture_moment(c, m), ref, 1e-10 * ref) << "m " << m;
    }
  EXPECT_DOUBLE_EQ(chi_mixture_moment({2.0, 3.0}, 2), 51.0);
}

TEST(ChiMixture, SamplerMatchesExactChiSquareLaw) {
  const auto draws = chi_mixture_samples({2.0}, 100000, 123);
  const double ks = ks_statistic(draws, [](double t) { return t <= 0 ? 0.0 : boost::math::gamma_p(0.5, t / 4.0); });
  // 1% critical value at 1e5 draws is about 0.0052.
  EXPECT_LT(ks, 0.0052);
  const auto two = chi_mixture_samples({1.0, 1.0}, 100000, 321);
  const double ks2 = ks_statistic(two, [](double t) { return t <= 0 ? 0.0 : 1.0 - std::exp(-t / 2.0); });
  EXPECT_LT(ks2, 0.0052);
}

TEST(SymEigen, AgreesWithEigenReferenceSolver) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> g;
  for (int n : {5, 50, 120}) {
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(gen);
    const EigenSystem ours = sym_eigen(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref{Eigen::MatrixXd(a)};
    const double scale = ref.eigenvalues().cwiseAbs().maxCoeff();
    for (int k = 0; k < n; ++k) {
      EXPECT_NEAR(ours.values(k), ref.eigenvalues()(n - 1 - k), 1e-12 * scale);
      const double overlap = std::abs(ours.vectors.col(k).dot(ref.eigenvectors().col(n - 1 - k)));
      EXPECT_NEAR(overlap, 1.0, 1e-9);
    }
  }
}
