#include "elpd/gpd.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "elpd/error.hpp"

namespace elpd {
namespace {

void check_scale(const GeneralizedPareto& d) {
  if (!(d.scale > 0.0) || !std::isfinite(d.scale)) {
    fail(Errc::invalid_argument, "generalized Pareto scale must be positive, got " +
                                     std::to_string(d.scale));
  }
}

// mean_j log1p(-theta * x_j)
double mean_log1p(double theta, std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += std::log1p(-theta * v);
  return sum / static_cast<double>(x.size());
}

// Splits a positive normal double into a mantissa in [0.5, 1) and adds its
// binary exponent to `exponent`.
double split_exponent(double m, long& exponent) {
  constexpr std::uint64_t kExponentMask = std::uint64_t{0x7ff} << 52;
  auto bits = std::bit_cast<std::uint64_t>(m);
  exponent += static_cast<long>((bits & kExponentMask) >> 52) - 1022;
  bits = (bits & ~kExponentMask) | (std::uint64_t{1022} << 52);
  return std::bit_cast<double>(bits);
}

// mean_log1p for the candidate weights, as the log of running products with
// the binary exponent split off every few factors: a handful of logs instead
// of one per value. Falls back to mean_log1p when theta x is small enough for
// 1 - theta x to lose precision or extreme enough to leave the normal range
// within a block. x must be sorted.
double fast_mean_log1p(double theta, std::span<const double> x) {
  const double largest = x.back() * std::abs(theta);
  if (largest < 1e-3 || largest > 1e30 || 1.0 - theta * x.back() < 1e-30) return mean_log1p(theta, x);
  // Four independent products so the multiplies overlap; every factor lies
  // in [1e-30, 1e30], so eight of them stay normal.
  double p0 = 1.0;
  double p1 = 1.0;
  double p2 = 1.0;
  double p3 = 1.0;
  long exponent = 0;
  const double* v = x.data();
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    for (std::size_t b = i; b < i + 32; b += 4) {
      p0 *= 1.0 - theta * v[b];
      p1 *= 1.0 - theta * v[b + 1];
      p2 *= 1.0 - theta * v[b + 2];
      p3 *= 1.0 - theta * v[b + 3];
    }
    p0 = split_exponent(p0, exponent);
    p1 = split_exponent(p1, exponent);
    p2 = split_exponent(p2, exponent);
    p3 = split_exponent(p3, exponent);
  }
  for (std::size_t b = 0; i < n; ++i, ++b) {
    p0 *= 1.0 - theta * v[i];
    if (b % 8 == 7) p0 = split_exponent(p0, exponent);
  }
  const double log_product = std::log((p0 * p1) * (p2 * p3)) + static_cast<double>(exponent) * std::numbers::ln2;
  return log_product / static_cast<double>(n);
}

// Profile log-likelihood per observation at theta, with the shape profiled
// out: k(theta) = mean log1p(-theta x), sigma = -k / theta.
double profile_loglik(double theta, std::span<const double> x, double mean_x) {
  if (std::abs(theta) < std::numeric_limits<double>::min() * 1e10) {
    // Exponential limit: sigma = mean(x).
    return -std::log(mean_x) - 1.0;
  }
  const double k = fast_mean_log1p(theta, x);
  return std::log(-theta / k) - k - 1.0;
}

}  // namespace

double gpd_quantile(const GeneralizedPareto& d, double p) {
  check_scale(d);
  if (!(p >= 0.0 && p < 1.0)) {
    fail(Errc::invalid_probability, "probability must lie in [0, 1), got " + std::to_string(p));
  }
  // -log(1 - p)
  const double tail_log = -std::log1p(-p);
  if (std::abs(d.shape) < kShapeZeroCutoff) return d.location + d.scale * tail_log;
  return d.location + d.scale * std::expm1(d.shape * tail_log) / d.shape;
}

double gpd_cdf(const GeneralizedPareto& d, double x) {
  check_scale(d);
  const double z = (x - d.location) / d.scale;
  if (!(z >= 0.0)) fail(Errc::out_of_support, "x = " + std::to_string(x) + " is below the location");
  if (std::abs(d.shape) < kShapeZeroCutoff) return -std::expm1(-z);
  if (d.shape < 0.0 && z > -1.0 / d.shape) {
    fail(Errc::out_of_support, "x = " + std::to_string(x) + " is above the upper support bound");
  }
  if (!std::isfinite(z)) return 1.0;
  return -std::expm1(-std::log1p(d.shape * z) / d.shape);
}

TailFit fit_gpd(std::span<const double> exceedances, double threshold) {
  const std::size_t count = exceedances.size();
  if (count < kMinTailSize) {
    fail(Errc::insufficient_tail, "need at least " + std::to_string(kMinTailSize) +
                                      " exceedances, got " + std::to_string(count));
  }
  std::vector<double> x(exceedances.begin(), exceedances.end());
  for (double v : x) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      fail(Errc::non_positive_exceedance, "exceedances must be positive and finite, got " +
                                              std::to_string(v));
    }
  }
  if (!std::is_sorted(x.begin(), x.end())) std::sort(x.begin(), x.end());

  const double n = static_cast<double>(count);
  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const std::size_t candidates = 30 + static_cast<std::size_t>(std::floor(std::sqrt(n)));
  // Empirical prior constant of the reference procedure.
  constexpr double kPrior = 3.0;
  const auto quartile_rank = static_cast<std::size_t>(std::floor(n / 4.0 + 0.5));
  const double first_quartile = x[std::max<std::size_t>(quartile_rank, 1) - 1];
  const double largest = x.back();

  std::vector<double> theta(candidates);
  std::vector<double> loglik(candidates);
  for (std::size_t j = 0; j < candidates; ++j) {
    const double rank = static_cast<double>(j + 1);
    theta[j] = 1.0 / largest +
               (1.0 - std::sqrt(static_cast<double>(candidates) / (rank - 0.5))) /
                   (kPrior * first_quartile);
    loglik[j] = n * profile_loglik(theta[j], x, mean_x);
  }

  // Posterior weights w_j = 1 / sum_l exp(L_l - L_j), accumulated stably.
  const double peak = *std::max_element(loglik.begin(), loglik.end());
  double normalizer = 0.0;
  for (double l : loglik) normalizer += std::exp(l - peak);
  double theta_hat = 0.0;
  for (std::size_t j = 0; j < candidates; ++j) {
    theta_hat += theta[j] * std::exp(loglik[j] - peak) / normalizer;
  }

  GeneralizedPareto dist{threshold, mean_x, 0.0};
  if (std::abs(theta_hat * largest) > 1e-14) {
    const double shape = mean_log1p(theta_hat, x);
    dist.shape = shape;
    dist.scale = -shape / theta_hat;
  }
  return TailFit{dist, count};
}

}  // namespace elpd
