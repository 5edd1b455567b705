#pragma once

#include <span>

namespace lppl {

double normal_cdf(double x);

/// Inverse of the standard normal CDF on (0, 1). Acklam's rational
/// approximation polished by one Halley step; accurate to ~1e-15.
double normal_quantile(double p);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

/// Sample moments; skewness and kurtosis use the population (g1, g2) forms.
Moments sample_moments(std::span<const double> x);

/// Lag-1 autocorrelation about the sample mean.
double lag1_autocorrelation(std::span<const double> x);

}  // namespace lppl
