#include "spikedeig/centering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spikedeig/errors.hpp"
#include "spikedeig/spectral.hpp"

namespace spikedeig {

Poly poly_multiply(const Poly& p, const Poly& q, std::size_t max_degree) {
  if (p.empty() || q.empty()) return {};
  const std::size_t deg = std::min(p.size() + q.size() - 2, max_degree);
  Poly out(deg + 1, 0.0);
  for (std::size_t i = 0; i < p.size() && i <= deg; ++i) {
    if (p[i] == 0.0) continue;
    const std::size_t jmax = std::min(q.size() - 1, deg - i);
    for (std::size_t j = 0; j <= jmax; ++j) out[i + j] += p[i] * q[j];
  }
  return out;
}

double poly_eval(const Poly& p, double z) {
  double acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * z + p[i];
  return acc;
}

std::size_t truncation_order(std::size_t n, std::size_t M) {
  if (M < 1 || M >= n) throw Error(Errc::InvalidDims, "truncation_order needs 1 <= M < n");
  const double ratio = 8.0 * std::log(static_cast<double>(n)) / std::log(static_cast<double>(n) / M);
  return static_cast<std::size_t>(std::floor(ratio * (1.0 + 1e-12)));
}

namespace {

void require_nu(std::size_t nu, std::size_t M) {
  if (nu < 1 || nu > M) throw Error(Errc::IndexOutOfRange, "nu must lie in 1..M");
}

Vector resolvent_diagonal(const std::vector<double>& spikes, std::size_t nu) {
  const std::size_t M = spikes.size();
  const double l = spikes[nu - 1];
  Vector r = Vector::Zero(M);
  for (std::size_t k = 0; k < M; ++k) {
    if (k == nu - 1) continue;
    if (std::abs(spikes[k] - l) < 1e-12 * l) throw Error(Errc::NotSeparated, "spike tie at nu");
    r(k) = 1.0 / (spikes[k] - l);
  }
  return r;
}

}  // namespace

MatrixPoly matrix_polynomial_Mnu(const std::vector<double>& spikes, std::size_t nu, std::size_t n, std::size_t s) {
  const std::size_t M = spikes.size();
  require_nu(nu, M);
  const Vector r = resolvent_diagonal(spikes, nu);
  const double inv_n = 1.0 / static_cast<double>(n);
  const double l = spikes[nu - 1];
  Vector root(M);
  for (std::size_t k = 0; k < M; ++k) root(k) = std::sqrt(spikes[k]);
  const Vector r_root = r.cwiseProduct(root);

  // Work with the scaled steps A/n and B/n so that
  // n^{-(j+1)} (A + zB)^j = (1/n) ((A + zB)/n)^j.
  const Matrix a_step = -inv_n * r_root * root.transpose();
  const Vector b_step = l * r;

  MatrixPoly result(s + 1, Matrix::Zero(M, M));
  MatrixPoly current{r_root * Vector::Ones(M).transpose()};
  result[0] = inv_n * root.asDiagonal() * current[0];
  for (std::size_t j = 1; j <= s; ++j) {
    MatrixPoly next(j + 1, Matrix::Zero(M, M));
    for (std::size_t d = 0; d < current.size(); ++d) {
      next[d].noalias() += a_step * current[d];
      next[d + 1].noalias() += b_step.asDiagonal() * current[d];
    }
    for (std::size_t d = 0; d <= j; ++d) result[d].noalias() += inv_n * root.asDiagonal() * next[d];
    current = std::move(next);
  }
  return result;
}

AbcCoefficients abc_coefficients(const MatrixPoly& poly, const std::vector<double>& spikes, std::size_t nu,
                                 std::size_t n) {
  const std::size_t M = spikes.size();
  require_nu(nu, M);
  if (poly.empty()) throw Error(Errc::InvalidDims, "empty matrix polynomial");
  const std::size_t s = poly.size() - 1;
  const std::size_t len = 2 * s + 1;
  const double l = spikes[nu - 1];
  const double dn = static_cast<double>(n);

  std::vector<Vector> col(s + 1);
  std::vector<double> colsum(s + 1, 0.0);
  for (std::size_t d = 0; d <= s; ++d) {
    if (static_cast<std::size_t>(poly[d].rows()) != M || static_cast<std::size_t>(poly[d].cols()) != M)
      throw Error(Errc::InvalidDims, "matrix polynomial coefficient has wrong shape");
    col[d] = poly[d].col(nu - 1);
    for (std::size_t k = 0; k < M; ++k) colsum[d] += col[d](k);
  }
  Vector inv_l(M);
  for (std::size_t k = 0; k < M; ++k) inv_l(k) = 1.0 / spikes[k];

  AbcCoefficients out;
  out.a.assign(len, 0.0);
  out.b.assign(len, 0.0);
  out.c.assign(len, 0.0);
  for (std::size_t d = 0; d <= s; ++d) {
    double acc = 0.0;
    for (std::size_t k = 0; k < M; ++k)
      if (k != nu - 1) acc += col[d](k);
    out.a[d] = -acc;
  }
  for (std::size_t p = 0; p <= s; ++p) {
    for (std::size_t q = 0; q <= s; ++q) {
      const double weighted = col[p].dot(inv_l.cwiseProduct(col[q]));
      const double plain = col[p].dot(col[q]);
      out.b[p + q] += -dn * l * weighted;
      out.c[p + q] += dn * plain + colsum[p] * colsum[q];
    }
  }
  return out;
}

OCoefficients compose_O(const Poly& a, const Poly& b, const Poly& c, std::size_t s) {
  const std::size_t len = 2 * s + 1;
  if (a.size() != len || b.size() != len || c.size() != len)
    throw Error(Errc::InvalidDims, "compose_O needs coefficient vectors of length 2s + 1");
  const std::size_t cap = 2 * s * s + 2 * s;
  Poly p(len);
  for (std::size_t i = 0; i < len; ++i) p[i] = 2.0 * a[i] + b[i] + c[i];
  Poly acc(cap + 1, 0.0);
  Poly term = p;
  for (std::size_t j = 0; j <= s; ++j) {
    for (std::size_t i = 0; i < term.size() && i <= cap; ++i) acc[i] += term[i];
    if (j < s) term = poly_multiply(term, b, cap);
  }
  OCoefficients out;
  out.O_bar = acc[0];
  out.O_j.assign(acc.begin() + 1, acc.end());
  return out;
}

PolynomialCoefficients polynomial_coefficients(const std::vector<double>& spikes, std::size_t nu, std::size_t n) {
  PolynomialCoefficients pc;
  pc.n = n;
  pc.M = spikes.size();
  pc.nu = nu;
  pc.s = truncation_order(n, pc.M);
  const MatrixPoly poly = matrix_polynomial_Mnu(spikes, nu, n, pc.s);
  AbcCoefficients abc = abc_coefficients(poly, spikes, nu, n);
  const OCoefficients o = compose_O(abc.a, abc.b, abc.c, pc.s);
  pc.a = std::move(abc.a);
  pc.b = std::move(abc.b);
  pc.c = std::move(abc.c);
  pc.O_bar = o.O_bar;
  pc.O_j = o.O_j;
  return pc;
}

std::vector<std::string> coefficient_bound_warnings(const PolynomialCoefficients& coeffs, double C) {
  std::vector<std::string> out;
  const double base = static_cast<double>(coeffs.M) / static_cast<double>(coeffs.n);
  if (std::abs(coeffs.O_bar) > C * base) {
    std::ostringstream os;
    os << "|O_bar| = " << std::abs(coeffs.O_bar) << " exceeds C M/n = " << C * base;
    out.push_back(os.str());
  }
  double bound = C * base;
  for (std::size_t j = 0; j < coeffs.O_j.size(); ++j) {
    bound *= C;
    if (std::abs(coeffs.O_j[j]) > bound) {
      std::ostringstream os;
      os << "|O_" << j + 1 << "| = " << std::abs(coeffs.O_j[j]) << " exceeds C^" << j + 2 << " M/n = " << bound;
      out.push_back(os.str());
    }
  }
  return out;
}

double x_polynomial(const PolynomialCoefficients& coeffs, double x) {
  double acc = 0.0;
  for (std::size_t j = coeffs.O_j.size(); j-- > 0;) acc = (acc + coeffs.O_j[j]) * x;
  return coeffs.O_bar + acc;
}

XRoot solve_x(const PolynomialCoefficients& coeffs) {
  auto g = [&](double y) { return y - x_polynomial(coeffs, y); };
  auto tolerance = [](double x) { return 1e-13 * (1.0 + std::abs(x)); };

  double heuristic = 0.0;
  const double base = 2.0 * std::abs(coeffs.O_bar);
  for (std::size_t j = 0; j < coeffs.O_j.size(); ++j)
    heuristic += std::abs(coeffs.O_j[j]) * std::pow(base, static_cast<double>(j));

  XRoot out;
  if (heuristic < 1.0) {
    double x = 0.0;
    for (int it = 1; it <= 200; ++it) {
      const double next = x_polynomial(coeffs, x);
      out.iterations = it;
      const bool settled = std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(next);
      x = next;
      if (settled) break;
    }
    out.x = x;
    out.residual = std::abs(g(x));
    out.method = "fixed_point";
    if (out.residual <= tolerance(x)) return out;
  }

  const double span =
      10.0 * std::max(std::abs(coeffs.O_bar), static_cast<double>(coeffs.M) / static_cast<double>(coeffs.n));
  double lo = -span, hi = span;
  double glo = g(lo), ghi = g(hi);
  if (glo == 0.0) return {lo, 0.0, "bisection", 0};
  if (ghi == 0.0) return {hi, 0.0, "bisection", 0};
  if ((glo < 0) == (ghi < 0)) throw Error(Errc::NoRoot, "no sign change of x - P(x) on the bracket");
  int it = 0;
  for (; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((gm < 0) == (glo < 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  out.x = std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
  out.residual = std::abs(g(out.x));
  out.method = "bisection";
  out.iterations = it;
  return out;
}

double iterate_x_expansion(const PolynomialCoefficients& coeffs, std::size_t k0) {
  if (k0 < 1) throw Error(Errc::InvalidDims, "k0 must be >= 1");
  double x = 0.0;
  for (std::size_t t = 1; t < k0; ++t) x = x_polynomial(coeffs, x);
  return x;
}

double trace_centering(const Vector& M_diag, double l_hat_nu, std::size_t n) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < M_diag.size(); ++i) {
    const double m = M_diag(i);
    if (!(l_hat_nu > m)) throw Error(Errc::NotInvertible, "l_hat does not exceed the bulk spectrum");
    acc += m / (l_hat_nu - m);
  }
  return acc / static_cast<double>(n);
}

double statistical_centering(const std::vector<double>& l_hat, std::size_t nu, std::size_t n) {
  require_nu(nu, l_hat.size());
  const double lv = l_hat[nu - 1];
  double acc = 0.0;
  for (std::size_t k = 0; k < l_hat.size(); ++k) {
    if (k == nu - 1) continue;
    const double gap = l_hat[k] - lv;
    if (std::abs(gap) <= 1e-12 * std::abs(lv)) throw Error(Errc::TiedEigenvalues, "tied sample eigenvalues");
    acc += l_hat[k] / gap;
  }
  return acc / static_cast<double>(n);
}

double oracle_centering(double l_nu, std::size_t N, std::size_t M, std::size_t n) {
  if (l_nu <= 1.0 + 1e-12) throw Error(Errc::SpikeAtOne, "spike must exceed 1");
  return static_cast<double>(N - M) / (static_cast<double>(n) * (l_nu - 1.0));
}

std::string XMode::to_string() const {
  switch (kind) {
    case Kind::Root: return "root";
    case Kind::Zero: return "zero";
    case Kind::Iterated: return "iter:" + std::to_string(k0);
  }
  return "zero";
}

XMode parse_x_mode(const std::string& text) {
  if (text == "root") return {XMode::Kind::Root, 1};
  if (text == "zero") return {XMode::Kind::Zero, 1};
  if (text.rfind("iter:", 0) == 0) {
    const std::string tail = text.substr(5);
    std::size_t used = 0;
    long k0 = -1;
    try {
      k0 = std::stol(tail, &used);
    } catch (const std::exception&) {
    }
    if (used == tail.size() && k0 >= 1) return {XMode::Kind::Iterated, static_cast<std::size_t>(k0)};
  }
  throw Error(Errc::ConfigInvalid, "x_mode must be root, zero or iter:<k0 >= 1>, got '" + text + "'");
}

CltMode parse_clt_mode(const std::string& text) {
  if (text == "mixed") return CltMode::Mixed;
  if (text == "statistical") return CltMode::Statistical;
  if (text == "oracle") return CltMode::Oracle;
  throw Error(Errc::ConfigInvalid, "mode must be mixed, statistical or oracle, got '" + text + "'");
}

std::string to_string(CltMode mode) {
  switch (mode) {
    case CltMode::Mixed: return "mixed";
    case CltMode::Statistical: return "statistical";
    case CltMode::Oracle: return "oracle";
  }
  return "mixed";
}

XMode default_x_mode(std::size_t n, std::size_t M) {
  if (static_cast<double>(M) <= std::sqrt(static_cast<double>(n)) / 4.0) return {XMode::Kind::Zero, 1};
  return {XMode::Kind::Root, 1};
}

double shift_for_mode(const PolynomialCoefficients& coeffs, const XMode& mode) {
  switch (mode.kind) {
    case XMode::Kind::Zero: return 0.0;
    case XMode::Kind::Root: return solve_x(coeffs).x;
    case XMode::Kind::Iterated: return iterate_x_expansion(coeffs, mode.k0);
  }
  return 0.0;
}

double centering_for_mode(const CenteringBundle& bundle, CltMode mode) {
  switch (mode) {
    case CltMode::Mixed: return bundle.c_tr + bundle.x;
    case CltMode::Statistical: return bundle.c_tr + bundle.stat_sum;
    case CltMode::Oracle: return bundle.oracle + bundle.x;
  }
  return 0.0;
}

double clt_statistic(double l_hat_nu, double l_nu, const CenteringBundle& bundle, CltMode mode) {
  return bundle.scale * (l_hat_nu / l_nu - 1.0 - centering_for_mode(bundle, mode));
}

namespace {

double clt_scale(std::size_t n, const EntryLaw& law) {
  const double excess = law.fourth_moment() - 1.0;
  if (!(excess > 0.0)) throw Error(Errc::InvalidSpec, "E z^4 = 1 leaves the CLT scale undefined");
  return std::sqrt(static_cast<double>(n) / excess);
}

}  // namespace

CenteringBundle centering_bundle(const std::vector<double>& l_hat, const Vector& M_diag,
                                 const std::vector<double>& spikes, std::size_t nu, std::size_t n,
                                 std::size_t N, const EntryLaw& law, double x, double x_tilde) {
  require_nu(nu, spikes.size());
  CenteringBundle b;
  b.c_tr = trace_centering(M_diag, l_hat.at(nu - 1), n);
  b.stat_sum = statistical_centering(l_hat, nu, n);
  b.oracle = oracle_centering(spikes[nu - 1], N, spikes.size(), n);
  b.x = x;
  b.x_tilde = x_tilde;
  b.scale = clt_scale(n, law);
  return b;
}

double clt_statistics(const BlockDecomposition& bd, const Alignment& al, const std::vector<double>& l_hat,
                      const EntryLaw& law, CltMode mode, double x) {
  const std::vector<double> spikes(bd.spikes.data(), bd.spikes.data() + bd.spikes.size());
  CenteringBundle b;
  b.scale = clt_scale(bd.n, law);
  b.x = x;
  switch (mode) {
    case CltMode::Mixed:
      b.c_tr = trace_centering(bd.M_diag, al.l_hat, bd.n);
      break;
    case CltMode::Statistical:
      b.c_tr = trace_centering(bd.M_diag, al.l_hat, bd.n);
      b.stat_sum = statistical_centering(l_hat, al.nu, bd.n);
      break;
    case CltMode::Oracle:
      b.oracle = oracle_centering(spikes[al.nu - 1], bd.N, bd.M, bd.n);
      break;
  }
  return clt_statistic(al.l_hat, spikes[al.nu - 1], b, mode);
}

Matrix d_matrix(const BlockDecomposition& bd, double l_hat) {
  Matrix d = bd.S_AA + resolvent_form(bd, l_hat, 1);
  d.diagonal() -= bd.spikes;
  return d;
}

SeriesReport series_expansion_check(const Matrix& D, const Vector& a, double l_hat,
                                    const std::vector<double>& spikes, std::size_t nu, std::size_t J) {
  const std::size_t M = spikes.size();
  require_nu(nu, M);
  const std::size_t v = nu - 1;
  const Vector r = resolvent_diagonal(spikes, nu);
  const Matrix Mnu = r.asDiagonal() * (D - (l_hat - spikes[v]) * Matrix::Identity(M, M));

  SeriesReport out;
  const Vector sv = sym_eigenvalues(Matrix(Mnu.transpose() * Mnu));
  out.norm_M = std::sqrt(std::max(0.0, sv(0)));
  if (out.norm_M >= 1.0) throw Error(Errc::SeriesDiverges, "||M_nu|| >= 1");

  Vector term = r.asDiagonal() * D.col(v);
  Vector sigma = term;
  double prev_norm = term.norm();
  for (std::size_t j = 1; j <= J; ++j) {
    term = -(Mnu * term);
    sigma += term;
    const double tn = term.norm();
    if (j == J) out.decay_ratio = prev_norm > 0.0 ? tn / prev_norm : 0.0;
    prev_norm = tn;
  }

  // a - e with the nu-th entry written as -|a_perp|^2 / (1 + a_nu) to avoid
  // the cancellation in a_nu - 1.
  double perp2 = 0.0;
  for (std::size_t k = 0; k < M; ++k)
    if (k != v) perp2 += a(k) * a(k);
  const double diff_nu = -perp2 / (1.0 + a(v));
  const double ae2 = perp2 + diff_nu * diff_nu;
  const double coef = ae2 / 2.0 - 1.0;
  double sigma0 = 0.0;
  for (std::size_t k = 0; k < M; ++k) {
    if (k == v) continue;
    out.residual_alignment = std::max(out.residual_alignment, std::abs(a(k) - coef * sigma(k)));
    sigma0 += sigma(k) * sigma(k);
  }
  const double sigma3 = ae2 - ae2 * ae2 / 4.0;
  out.residual_sigma3 = std::abs(sigma3 - sigma0 / (1.0 + sigma0));
  return out;
}

SeriesReport series_expansion_check(const BlockDecomposition& bd, const Alignment& al,
                                    const std::vector<double>& spikes, std::size_t nu, std::size_t J) {
  return series_expansion_check(d_matrix(bd, al.l_hat), al.a, al.l_hat, spikes, nu, J);
}

}  // namespace spikedeig
