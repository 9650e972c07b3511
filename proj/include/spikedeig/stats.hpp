#pragma once

#include <functional>
#include <vector>

namespace spikedeig {

double normal_cdf(double x);
double normal_quantile(double p);

// sup_t |F_emp(t) - F(t)|, evaluated on both sides of every jump.
// Throws Empty for no samples.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double kurtosis = 0.0;  // excess
};

Moments sample_moments(const std::vector<double>& x);

double median(std::vector<double> x);

}  // namespace spikedeig
