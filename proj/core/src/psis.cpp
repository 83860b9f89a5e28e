#include "elpd/psis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "elpd/error.hpp"
#include "elpd/loglik.hpp"

namespace elpd {
namespace {

// log(exp(a) + exp(b))
double log_add_exp(double a, double b) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  return hi + std::log1p(std::exp(lo - hi));
}

// log of gpd_quantile, finite even where the quantile itself overflows
// (very large k at p close to 1). Requires location > 0.
double log_gpd_quantile(const GeneralizedPareto& d, double p) {
  const double q = gpd_quantile(d, p);
  if (std::isfinite(q)) return std::log(q);
  const double tail_log = -std::log1p(-p);
  const double a = d.shape * tail_log;
  // log(expm1(a)) for large a.
  const double log_expm1 = a > 30.0 ? a + std::log1p(-std::exp(-a)) : std::log(std::expm1(a));
  const double log_excess = std::log(d.scale / d.shape) + log_expm1;
  return log_add_exp(std::log(d.location), log_excess);
}

void apply_cap(std::vector<double>& log_weights, double log_level) {
  for (double& w : log_weights) w = std::min(w, log_level);
}

}  // namespace

std::string_view to_string(WeightMethod method) {
  switch (method) {
    case WeightMethod::raw: return "raw";
    case WeightMethod::truncated: return "truncated";
    case WeightMethod::psis: return "psis";
  }
  return "unknown";
}

std::string_view to_string(DiagnosticLevel level) {
  switch (level) {
    case DiagnosticLevel::good: return "good";
    case DiagnosticLevel::ok: return "ok";
    case DiagnosticLevel::warn_high: return "warn_high";
    case DiagnosticLevel::severe: return "severe";
  }
  return "unknown";
}

std::vector<double> raw_log_ratios(std::span<const double> loglik_column) {
  std::vector<double> out(loglik_column.size());
  std::transform(loglik_column.begin(), loglik_column.end(), out.begin(), [](double v) { return -v; });
  return out;
}

SmoothedWeights raw_weights(std::span<const double> log_ratios) {
  SmoothedWeights out;
  out.log_weights.assign(log_ratios.begin(), log_ratios.end());
  out.method = WeightMethod::raw;
  out.log_truncation_level = std::numeric_limits<double>::infinity();
  return out;
}

SmoothedWeights truncate_weights(std::span<const double> log_ratios, double exponent) {
  if (log_ratios.empty()) fail(Errc::empty_input, "no importance ratios to truncate");
  if (!(exponent > 0.0 && exponent <= 1.0)) {
    fail(Errc::invalid_argument, "truncation exponent must lie in (0, 1], got " + std::to_string(exponent));
  }
  SmoothedWeights out;
  out.log_weights.assign(log_ratios.begin(), log_ratios.end());
  out.method = WeightMethod::truncated;
  out.truncation_exponent = exponent;
  const double log_draws = std::log(static_cast<double>(log_ratios.size()));
  out.log_truncation_level = exponent * log_draws + log_mean_exp(log_ratios);
  apply_cap(out.log_weights, out.log_truncation_level);
  return out;
}

SmoothedWeights psis_smooth(std::span<const double> log_ratios, const PsisOptions& options) {
  if (log_ratios.empty()) fail(Errc::empty_input, "no importance ratios to smooth");
  const double log_shift = *std::max_element(log_ratios.begin(), log_ratios.end());
  std::vector<double> linear(log_ratios.size());
  for (std::size_t s = 0; s < linear.size(); ++s) linear[s] = std::exp(log_ratios[s] - log_shift);
  return psis_smooth(log_ratios, linear, options);
}

SmoothedWeights psis_smooth(std::span<const double> log_ratios, std::vector<double>& linear,
                            const PsisOptions& options) {
  if (!(options.tail_fraction > 0.0 && options.tail_fraction < 1.0)) {
    fail(Errc::invalid_argument, "tail fraction must lie in (0, 1), got " +
                                     std::to_string(options.tail_fraction));
  }
  if (!(options.truncation_exponent > 0.0 && options.truncation_exponent <= 1.0)) {
    fail(Errc::invalid_argument, "truncation exponent must lie in (0, 1], got " +
                                     std::to_string(options.truncation_exponent));
  }
  const std::size_t draws = log_ratios.size();
  if (draws == 0) fail(Errc::empty_input, "no importance ratios to smooth");
  if (linear.size() != draws) {
    fail(Errc::length_mismatch, "linear ratios length " + std::to_string(linear.size()) +
                                    " differs from log ratios length " + std::to_string(draws));
  }

  auto degenerate = [&] {
    linear.clear();
    SmoothedWeights out = truncate_weights(log_ratios, options.truncation_exponent);
    out.method = WeightMethod::psis;
    out.tail_degenerate = true;
    return out;
  };

  const auto tail_size = static_cast<std::size_t>(
      std::ceil(options.tail_fraction * static_cast<double>(draws)));
  if (tail_size < kMinTailSize || tail_size >= draws) return degenerate();

  const double log_shift = *std::max_element(log_ratios.begin(), log_ratios.end());

  // Rank draws by (ratio, index); only the top tail_size + 1 need ordering.
  std::vector<std::pair<double, std::size_t>> ranked(draws);
  for (std::size_t s = 0; s < draws; ++s) ranked[s] = {log_ratios[s], s};
  auto less = [](const std::pair<double, std::size_t>& a, const std::pair<double, std::size_t>& b) {
    return a.first < b.first || (a.first == b.first && a.second < b.second);
  };
  const std::size_t cut_rank = draws - tail_size - 1;
  std::nth_element(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(cut_rank), ranked.end(), less);
  std::sort(ranked.begin() + static_cast<std::ptrdiff_t>(cut_rank) + 1, ranked.end(), less);

  // Work on exp(log_ratio - log_shift) in (0, 1]; the cutoff is floored at
  // the smallest normal double so exceedances stay representable.
  const double log_cutoff = std::max(ranked[cut_rank].first - log_shift,
                                     std::log(std::numeric_limits<double>::min()));
  const double cutoff = std::exp(log_cutoff);

  std::vector<std::size_t> tail_indices;
  std::vector<double> exceedances;
  tail_indices.reserve(tail_size);
  exceedances.reserve(tail_size);
  for (std::size_t r = cut_rank + 1; r < draws; ++r) {
    const std::size_t s = ranked[r].second;
    const double excess = linear[s] - cutoff;
    // Ties with the threshold, or values lost to underflow, stay in the bulk.
    if (excess > 0.0) {
      tail_indices.push_back(s);
      exceedances.push_back(excess);
    }
  }
  if (tail_indices.size() < kMinTailSize || exceedances.front() == exceedances.back()) {
    return degenerate();
  }

  const TailFit fit = fit_gpd(exceedances, cutoff);

  SmoothedWeights out;
  out.log_weights.assign(log_ratios.begin(), log_ratios.end());
  out.method = WeightMethod::psis;
  out.truncation_exponent = options.truncation_exponent;
  out.k_hat = fit.dist.shape;
  out.tail_fit = fit;
  out.log_shift = log_shift;

  const double tail_count = static_cast<double>(tail_indices.size());
  bool linear_finite = true;
  for (std::size_t z = 0; z < tail_indices.size(); ++z) {
    const double p = (static_cast<double>(z) + 0.5) / tail_count;
    const std::size_t s = tail_indices[z];
    const double q = gpd_quantile(fit.dist, p);
    if (std::isfinite(q)) {
      linear[s] = q;
      out.log_weights[s] = std::log(q) + log_shift;
    } else {
      out.log_weights[s] = log_gpd_quantile(fit.dist, p) + log_shift;
      linear_finite = false;
    }
  }
  out.tail_indices = std::move(tail_indices);

  double log_mean = 0.0;
  const double linear_sum = linear_finite ? std::accumulate(linear.begin(), linear.end(), 0.0) : 0.0;
  if (std::isfinite(linear_sum) && linear_sum > 0.0) {
    log_mean = log_shift + std::log(linear_sum / static_cast<double>(draws));
  } else {
    log_mean = log_mean_exp(out.log_weights);
  }
  const double log_draws = std::log(static_cast<double>(draws));
  out.log_truncation_level = options.truncation_exponent * log_draws + log_mean;
  apply_cap(out.log_weights, out.log_truncation_level);
  const double linear_cap = std::exp(out.log_truncation_level - log_shift);
  if (linear_finite && std::isfinite(linear_cap)) {
    for (double& w : linear) w = std::min(w, linear_cap);
  } else {
    linear.clear();
  }
  return out;
}

DiagnosticFlag diagnose(std::optional<double> k_hat) {
  DiagnosticFlag flag{DiagnosticLevel::good, k_hat};
  if (!k_hat) return flag;
  const double k = *k_hat;
  if (k < 0.5) {
    flag.level = DiagnosticLevel::good;
  } else if (k <= 0.7) {
    flag.level = DiagnosticLevel::ok;
  } else if (k <= 1.0) {
    flag.level = DiagnosticLevel::warn_high;
  } else {
    flag.level = DiagnosticLevel::severe;
  }
  return flag;
}

}  // namespace elpd
