#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spikedeig/block.hpp"
#include "spikedeig/types.hpp"

namespace spikedeig {

struct RatioCoefficients {
  std::size_t nu = 1;
  std::vector<double> c;      // l_k l_nu / (l_k - l_nu)^2 for k != nu, increasing k
  double sigma_nu = 0.0;      // (1/M) sum c_k^2
  std::optional<double> c_nu; // l_nu / (n/M)
};

// Throws NotSeparated on a spike tie at nu.
RatioCoefficients ratio_coefficients(const std::vector<double>& spikes, std::size_t nu, std::size_t n,
                                     std::size_t M);

enum class EigvecVariant { A, B, C1, C2 };

EigvecVariant parse_eigvec_variant(const std::string& text);
std::string to_string(EigvecVariant v);

struct EigvecStatistic {
  EigvecVariant variant = EigvecVariant::A;
  double value = 0.0;
  bool empirical = false;
};

//   A:      l (1 - <p,u>^2) - N/n
//   B, C2:  l (1 - <p,u>^2) - (l/n) sum_{k != nu} c_k - N/n
//   C1:     n (1 - <p,u>^2)
// `values` holds the population spikes, or the top-M sample eigenvalues when
// `empirical` is set; l and c_k are then computed from those.
EigvecStatistic eigvec_statistic(const Alignment& al, const std::vector<double>& values, std::size_t nu,
                                 std::size_t n, std::size_t N, EigvecVariant variant, bool empirical);

// sum c_k y_k^2 with independent standard normals, one draw per seed.
double chi_mixture_sample(const std::vector<double>& c, std::uint64_t seed);

// `count` draws from one seed (draw i uses normals 2i*len .. of the stream).
std::vector<double> chi_mixture_samples(const std::vector<double>& c, std::size_t count, std::uint64_t seed);

// E[(sum c_k y_k^2)^m] by enumerating compositions of m. Throws TooLarge for
// m > 8 or more than 12 weights.
double chi_mixture_moment(const std::vector<double>& c, unsigned m);

struct LemmaDiagnostics {
  double lemma1_second = 0.0;  // l^4 sum_{k != nu} (t_k^T M (l_hat - M)^{-2} t_nu)^2
  double lemma1_first = 0.0;   // (n/M) sum_{k != nu} (t_k^T M (l_hat - M)^{-1} t_nu)^2
  double beta = 0.0;           // ||R D e_nu||
  double beta_ratio = 0.0;     // ||a - e|| / beta
  double lemma3 = 0.0;         // l_hat R^2 - N/n
};

LemmaDiagnostics lemma_diagnostics(const BlockDecomposition& bd, const Alignment& al, std::size_t nu);

}  // namespace spikedeig
