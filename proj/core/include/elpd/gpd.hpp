#pragma once

#include <cstddef>
#include <span>

namespace elpd {

// Generalized Pareto distribution with location mu, scale sigma > 0 and shape
// k. Heavy tails have k > 0; the support is [mu, inf) for k >= 0 and
// [mu, mu - sigma / k] for k < 0.
struct GeneralizedPareto {
  double location = 0.0;
  double scale = 1.0;
  double shape = 0.0;
};

// Fitted tail: the distribution of values above `threshold` (= dist.location)
// estimated from `exceedance_count` exceedances.
struct TailFit {
  GeneralizedPareto dist;
  std::size_t exceedance_count = 0;

  double threshold() const { return dist.location; }
};

// Smallest number of exceedances fit_gpd accepts.
inline constexpr std::size_t kMinTailSize = 5;

// |k| below this uses the exponential-limit formulas.
inline constexpr double kShapeZeroCutoff = 1e-6;

// Inverse CDF. p must lie in [0, 1); throws Error(invalid_probability).
double gpd_quantile(const GeneralizedPareto& d, double p);

// CDF on the support; throws Error(out_of_support) outside it.
double gpd_cdf(const GeneralizedPareto& d, double x);

// Zhang & Stephens (2009) empirical-Bayes estimate of (sigma, k) from strictly
// positive exceedances over `threshold`. The estimate is a profile-likelihood
// weighted average over m = 30 + floor(sqrt(M)) candidate values of
// theta = -k / sigma placed using the sample maximum and first quartile.
// No shrinkage is applied to k.
//
// Throws Error(insufficient_tail) when fewer than kMinTailSize values are
// given and Error(non_positive_exceedance) for values <= 0 or non-finite.
TailFit fit_gpd(std::span<const double> exceedances, double threshold);

}  // namespace elpd
