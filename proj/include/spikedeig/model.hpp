#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spikedeig/types.hpp"

namespace spikedeig {

enum class LawKind { Gaussian, UniformScaled, TwoPointSymmetric };

// Mean-zero, unit-variance entry distribution.
//
// UniformScaled is uniform on [-sqrt(3), sqrt(3)].
// TwoPointSymmetric(p) takes +sqrt((1-p)/p) with probability p and
// -sqrt(p/(1-p)) otherwise; p = 1/2 is Rademacher.
class EntryLaw {
 public:
  static EntryLaw gaussian() { return EntryLaw(LawKind::Gaussian, 0.5); }
  static EntryLaw uniform_scaled() { return EntryLaw(LawKind::UniformScaled, 0.5); }
  static EntryLaw two_point(double p);

  LawKind kind() const { return kind_; }
  double p() const { return p_; }
  double fourth_moment() const;
  // psi_2 norm inf{t : E exp(z^2/t^2) <= 2}, computed for the exact law.
  double psi2_bound() const;
  bool clt_eligible(double delta0) const { return fourth_moment() >= 1.0 + delta0; }
  std::string name() const;

  // Maps a uniform draw on [0, 1) to a draw of the law (non-Gaussian kinds).
  double from_uniform(double u) const;

  bool operator==(const EntryLaw&) const = default;

 private:
  EntryLaw(LawKind kind, double p) : kind_(kind), p_(p) {}
  LawKind kind_;
  double p_;
};

// Parses "gaussian", "uniform", "rademacher" or "two_point:<p>".
EntryLaw parse_entry_law(const std::string& text);

// Spike given as c * n^a; a literal spike is a rule with a = 0.
struct SpikeRule {
  double coefficient = 1.0;
  double exponent = 0.0;
  double evaluate(std::size_t n) const;
};

// Accepts "c*n^a", "n^a", "c*n", "n", "c" (whitespace ignored).
SpikeRule parse_spike_rule(const std::string& text);

struct SpikedModelSpec {
  std::size_t n = 0;
  std::size_t N = 0;
  std::vector<double> spikes;   // descending, each >= 1
  std::optional<Matrix> basis;  // empty means the identity
  EntryLaw law = EntryLaw::gaussian();
  double gamma_bound = 10.0;  // requires 1/gamma <= N/n <= gamma

  std::size_t M() const { return spikes.size(); }
  // Throws Error(InvalidSpec) naming the violated invariant.
  void validate() const;
  Matrix covariance() const;
};

struct DataSample {
  Matrix X;  // N x n
  Matrix Z;  // N x n
};

// Entry (i, j) is the (i * cols + j)-th draw of a counter-based stream, so any
// sub-block can be regenerated independently.
Matrix sample_entry_matrix(std::size_t rows, std::size_t cols, const EntryLaw& law, std::uint64_t seed);

DataSample generate_data(const SpikedModelSpec& spec, std::uint64_t seed);

// Haar-like orthogonal matrix: QR of a Gaussian matrix with diag(R) > 0.
Matrix random_orthogonal(std::size_t N, std::uint64_t seed);

struct SeparationProfile {
  std::size_t nu = 1;
  double eps0 = 0.0;
  std::vector<double> ratios;  // l_k / l_nu
  bool lower_gap = false;      // l_nu / l_{nu+1} > 1 + eps0, l_{M+1} = 1
  bool upper_gap = false;      // l_{nu-1} / l_nu > 1 + eps0; vacuous at nu = 1
  bool separated = false;
};

SeparationProfile check_separation(const std::vector<double>& spikes, std::size_t nu, double eps0);
inline SeparationProfile check_separation(const SpikedModelSpec& spec, std::size_t nu, double eps0) {
  return check_separation(spec.spikes, nu, eps0);
}

}  // namespace spikedeig
