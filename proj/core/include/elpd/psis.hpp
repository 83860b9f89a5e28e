#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "elpd/gpd.hpp"

namespace elpd {

enum class WeightMethod { raw, truncated, psis };

std::string_view to_string(WeightMethod method);

// Importance weights for one data point, on the log scale and unnormalized.
struct SmoothedWeights {
  std::vector<double> log_weights;
  // Fitted tail shape; empty for raw and truncated weights and when the tail
  // was degenerate.
  std::optional<double> k_hat;
  WeightMethod method = WeightMethod::raw;
  // Exponent e of the S^e * mean truncation (unused for raw weights).
  double truncation_exponent = 0.0;
  std::size_t point_index = 0;

  // Log of the cap applied to every weight (+inf for raw weights).
  double log_truncation_level = 0.0;
  // PSIS only: the tail could not be fitted and the ratios were truncated
  // directly at S^e times their mean.
  bool tail_degenerate = false;
  // PSIS only. The tail was fitted to exp(log_ratio - log_shift) and
  // tail_indices lists the replaced draws in ascending rank order: the z-th
  // (1-based) received gpd_quantile(tail_fit->dist, (z - 1/2) / M) before
  // truncation.
  std::optional<TailFit> tail_fit;
  double log_shift = 0.0;
  std::vector<std::size_t> tail_indices;
};

struct PsisOptions {
  double tail_fraction = 0.2;
  double truncation_exponent = 0.75;
};

// log(1 / p(y_i | theta^s)) for every draw.
std::vector<double> raw_log_ratios(std::span<const double> loglik_column);

// Untouched ratios, as used by plain importance sampling.
SmoothedWeights raw_weights(std::span<const double> log_ratios);

// w_s = min(r_s, S^exponent * mean(r)). Exponent 1/2 is the standard
// truncated-IS cap; 1/4 gives heavy truncation.
SmoothedWeights truncate_weights(std::span<const double> log_ratios, double exponent = 0.5);

// Pareto smoothing: fit a generalized Pareto to the M = ceil(tail_fraction*S)
// largest ratios, replace them by the fitted quantiles at (z - 1/2) / M, then
// truncate at S^truncation_exponent times the mean smoothed weight.
//
// Ratios tied with the threshold (the largest ratio outside the tail) stay in
// the bulk. If fewer than kMinTailSize tail values remain, or they are all
// equal, the result has tail_degenerate set, no k_hat, and holds the ratios
// truncated at S^truncation_exponent * mean(r).
SmoothedWeights psis_smooth(std::span<const double> log_ratios, const PsisOptions& options = {});

// psis_smooth for callers that already hold the shifted ratios
// linear[s] = exp(log_ratios[s] - max(log_ratios)). On return `linear` holds
// the final weights on that scale (log_weights minus log_shift), or is empty
// when they are only available as log_weights.
SmoothedWeights psis_smooth(std::span<const double> log_ratios, std::vector<double>& linear,
                            const PsisOptions& options = {});

enum class DiagnosticLevel { good, ok, warn_high, severe };

std::string_view to_string(DiagnosticLevel level);

struct DiagnosticFlag {
  DiagnosticLevel level = DiagnosticLevel::good;
  std::optional<double> k_hat;

  // No tail fit was available; reported as good.
  bool degenerate() const { return !k_hat.has_value(); }
};

// good: k < 0.5, ok: 0.5 <= k <= 0.7, warn_high: 0.7 < k <= 1, severe: k > 1.
DiagnosticFlag diagnose(std::optional<double> k_hat);

}  // namespace elpd
