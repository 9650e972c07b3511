#pragma once

// Reference computations used by the oracle tests and the acceptance gate.
// They deliberately avoid the library's algorithms: no square roots in the
// polynomial chain, no scaled recursion, wider arithmetic.

#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using f128 = __float128;
using big = boost::multiprecision::cpp_bin_float_50;

template <typename T>
using Mat = std::vector<T>;  // row-major M x M

template <typename T>
struct Abc {
  std::vector<T> a, b, c;
};

// Coefficients of a, b, c from the definition, after conjugating by
// L^{1/2}: M_nu(z) = sum_j n^{-(j+1)} (-R L I~ + n z l_nu R)^j R L I~, with I~
// the all-ones matrix. Full matrix-polynomial powers, no shortcuts.
template <typename T>
Abc<T> naive_abc(const std::vector<T>& l, std::size_t nu, const T& n, std::size_t s) {
  const std::size_t M = l.size();
  const std::size_t v = nu - 1;
  std::vector<T> r(M, T(0));
  for (std::size_t k = 0; k < M; ++k)
    if (k != v) r[k] = T(1) / (l[k] - l[v]);

  Mat<T> p0(M * M), p1(M * M, T(0)), tail(M * M);
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j < M; ++j) {
      p0[i * M + j] = -(r[i] * l[i]);
      tail[i * M + j] = r[i] * l[i];
    }
    p1[i * M + i] = n * l[v] * r[i];
  }

  auto mul = [M](const Mat<T>& x, const Mat<T>& y) {
    Mat<T> out(M * M, T(0));
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t k = 0; k < M; ++k) {
        const T xik = x[i * M + k];
        for (std::size_t j = 0; j < M; ++j) out[i * M + j] += xik * y[k * M + j];
      }
    return out;
  };

  // power[d] is the z^d coefficient of (p0 + z p1)^j.
  std::vector<Mat<T>> power{Mat<T>(M * M, T(0))};
  for (std::size_t i = 0; i < M; ++i) power[0][i * M + i] = T(1);
  std::vector<Mat<T>> m_poly(s + 1, Mat<T>(M * M, T(0)));
  T scale = T(1) / n;
  for (std::size_t j = 0; j <= s; ++j) {
    for (std::size_t d = 0; d <= j; ++d) {
      const Mat<T> term = mul(power[d], tail);
      for (std::size_t e = 0; e < M * M; ++e) m_poly[d][e] += scale * term[e];
    }
    if (j == s) break;
    std::vector<Mat<T>> next(j + 2, Mat<T>(M * M, T(0)));
    for (std::size_t d = 0; d <= j; ++d) {
      const Mat<T> a0 = mul(power[d], p0);
      const Mat<T> a1 = mul(power[d], p1);
      for (std::size_t e = 0; e < M * M; ++e) {
        next[d][e] += a0[e];
        next[d + 1][e] += a1[e];
      }
    }
    power = std::move(next);
    scale = scale / n;
  }

  Abc<T> out;
  out.a.assign(2 * s + 1, T(0));
  out.b.assign(2 * s + 1, T(0));
  out.c.assign(2 * s + 1, T(0));
  for (std::size_t d = 0; d <= s; ++d)
    for (std::size_t k = 0; k < M; ++k)
      if (k != v) out.a[d] -= m_poly[d][k * M + v];
  for (std::size_t p = 0; p <= s; ++p) {
    for (std::size_t q = 0; q <= s; ++q) {
      T weighted(0), plain(0), sp(0), sq(0);
      for (std::size_t k = 0; k < M; ++k) {
        const T prod = m_poly[p][k * M + v] * m_poly[q][k * M + v];
        weighted += prod / l[k];
        plain += prod;
        sp += m_poly[p][k * M + v];
        sq += m_poly[q][k * M + v];
      }
      out.b[p + q] -= n * l[v] * weighted;
      out.c[p + q] += n * plain + sp * sq;
    }
  }
  return out;
}

inline Abc<f128> naive_abc_f128(const std::vector<double>& spikes, std::size_t nu, std::size_t n, std::size_t s) {
  std::vector<f128> l(spikes.begin(), spikes.end());
  return naive_abc<f128>(l, nu, static_cast<f128>(n), s);
}

template <typename T>
T horner(const std::vector<T>& p, const T& x) {
  T acc(0);
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

// sum_{j=0}^{s} P(x) Q(x)^j with P = 2a + b + c, Q = b, evaluated directly.
inline f128 compose_eval(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& c,
                         std::size_t s, f128 x) {
  std::vector<f128> p(a.size()), q(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = 2 * static_cast<f128>(a[i]) + b[i] + c[i];
  const f128 pv = horner(p, x), qv = horner(q, x);
  f128 acc = 0, qj = 1;
  for (std::size_t j = 0; j <= s; ++j) {
    acc += pv * qj;
    qj *= qv;
  }
  return acc;
}

// O_bar + sum O_j x^j in wide arithmetic, plus the sum of |terms| for a
// relative error scale.
struct SeriesValue {
  f128 value = 0;
  f128 magnitude = 0;
};

inline SeriesValue o_series_eval(double O_bar, const std::vector<double>& O_j, f128 x) {
  SeriesValue out;
  out.value = O_bar;
  out.magnitude = O_bar < 0 ? -static_cast<f128>(O_bar) : static_cast<f128>(O_bar);
  f128 xp = 1;
  for (double o : O_j) {
    xp *= x;
    const f128 t = static_cast<f128>(o) * xp;
    out.value += t;
    out.magnitude += t < 0 ? -t : t;
  }
  return out;
}

// Newton iterations on y - O_bar - sum O_j y^j in 50-digit arithmetic.
inline big newton_root(double O_bar, const std::vector<double>& O_j, big start, int iterations = 64) {
  big y = start;
  for (int it = 0; it < iterations; ++it) {
    big val = 0, der = 0;
    for (std::size_t j = O_j.size(); j-- > 0;) {
      der = der * y + val;
      val = val * y + big(O_j[j]);
    }
    // val now holds sum_{j>=1} O_j y^{j-1}; der its derivative.
    const big poly = big(O_bar) + val * y;
    const big dpoly = val + der * y;
    const big g = y - poly;
    const big dg = 1 - dpoly;
    if (dg == 0) break;
    y -= g / dg;
  }
  return y;
}

// E[(sum c_k y_k^2)^m] from the cumulants kappa_i = 2^{i-1} (i-1)! sum c_k^i.
inline double chi_mixture_moment_cumulant(const std::vector<double>& c, unsigned m) {
  std::vector<long double> kappa(m + 1, 0.0L), mu(m + 1, 0.0L);
  long double fact = 1.0L;  // (i-1)!
  for (unsigned i = 1; i <= m; ++i) {
    if (i > 1) fact *= (i - 1);
    long double pw = 0.0L;
    for (double ck : c) pw += std::pow(static_cast<long double>(ck), static_cast<int>(i));
    kappa[i] = std::ldexp(1.0L, static_cast<int>(i) - 1) * fact * pw;
  }
  mu[0] = 1.0L;
  for (unsigned k = 1; k <= m; ++k) {
    long double binom = 1.0L;  // C(k-1, i-1)
    for (unsigned i = 1; i <= k; ++i) {
      mu[k] += binom * kappa[i] * mu[k - i];
      binom = binom * (k - i) / i;
    }
  }
  return static_cast<double>(mu[m]);
}

inline double to_double(f128 x) { return static_cast<double>(x); }
inline f128 abs128(f128 x) { return x < 0 ? -x : x; }

}  // namespace oracle
