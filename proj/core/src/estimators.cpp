#include "elpd/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "elpd/error.hpp"
#include "elpd/parallel.hpp"
#include "elpd/random.hpp"

namespace elpd {
namespace {

// Standard error of a sum; a single point carries no spread information.
double se_or_zero(std::span<const double> values) {
  return values.size() < 2 ? 0.0 : se_of(values);
}

Method method_of(const LooMethod& method) {
  switch (method.kind) {
    case LooMethod::Kind::is: return Method::is_loo;
    case LooMethod::Kind::tis: return Method::tis_loo;
    case LooMethod::Kind::psis: return Method::psis_loo;
  }
  return Method::psis_loo;
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::is_loo: return "is_loo";
    case Method::tis_loo: return "tis_loo";
    case Method::psis_loo: return "psis_loo";
    case Method::waic: return "waic";
    case Method::kfold: return "kfold";
  }
  return "unknown";
}

namespace {

// lpd and the weighted mean from log weights; one pass shares
// exp(v - peak) between them.
LooPoint weighted_point(std::span<const double> loglik_column, const SmoothedWeights& weights) {
  const auto& log_w = weights.log_weights;
  const double value_peak = *std::max_element(loglik_column.begin(), loglik_column.end());
  const double weight_peak = *std::max_element(log_w.begin(), log_w.end());
  // Draws whose weight is still the raw ratio 1 / p have w = c / e with
  // c = exp(-value_peak - weight_peak), which saves an exp when c is normal.
  const double c = std::exp(-value_peak - weight_peak);
  const bool reuse = c >= std::numeric_limits<double>::min() && std::isfinite(c);
  double plain = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  for (std::size_t s = 0; s < loglik_column.size(); ++s) {
    const double e = std::exp(loglik_column[s] - value_peak);
    const double w = reuse && log_w[s] == -loglik_column[s] && e >= std::numeric_limits<double>::min()
                         ? std::min(c / e, 1.0)
                         : std::exp(log_w[s] - weight_peak);
    plain += e;
    numerator += w * e;
    denominator += w;
  }
  LooPoint point;
  point.lpd = value_peak + std::log(plain / static_cast<double>(loglik_column.size()));
  point.elpd = numerator > std::numeric_limits<double>::min()
                   ? value_peak + std::log(numerator / denominator)
                   : log_weighted_mean_exp(loglik_column, log_w);
  point.k_hat = weights.k_hat;
  return point;
}

// PSIS point from the linear-scale weights. With r_s = exp(-v_s - max(-v)),
// exp(v_s - max v) = c / r_s for c = exp(min v - max v), so one exp per draw
// serves the ratios, lpd and the weighted mean.
LooPoint psis_point(std::span<const double> loglik_column, const LooMethod& method) {
  const std::vector<double> log_ratios = raw_log_ratios(loglik_column);
  const std::size_t draws = loglik_column.size();
  const auto [low, high] = std::minmax_element(loglik_column.begin(), loglik_column.end());
  const double value_peak = *high;
  const double log_shift = -*low;
  const double c = std::exp(*low - *high);
  const bool quotient = c >= std::numeric_limits<double>::min();

  std::vector<double> linear(draws);
  std::vector<double> e(draws);
  double plain = 0.0;
  for (std::size_t s = 0; s < draws; ++s) {
    linear[s] = std::exp(log_ratios[s] - log_shift);
    e[s] = quotient && linear[s] >= std::numeric_limits<double>::min()
               ? std::min(c / linear[s], 1.0)
               : std::exp(loglik_column[s] - value_peak);
    plain += e[s];
  }
  const SmoothedWeights weights =
      psis_smooth(log_ratios, linear, {method.tail_fraction, method.truncation_exponent});
  if (linear.empty()) return weighted_point(loglik_column, weights);

  double numerator = 0.0;
  double denominator = 0.0;
  for (std::size_t s = 0; s < draws; ++s) {
    numerator += linear[s] * e[s];
    denominator += linear[s];
  }
  LooPoint point;
  point.lpd = value_peak + std::log(plain / static_cast<double>(draws));
  point.elpd = numerator > std::numeric_limits<double>::min() && std::isfinite(denominator)
                   ? value_peak + std::log(numerator / denominator)
                   : log_weighted_mean_exp(loglik_column, weights.log_weights);
  point.k_hat = weights.k_hat;
  return point;
}

}  // namespace

LooPoint loo_point(std::span<const double> loglik_column, const LooMethod& method) {
  switch (method.kind) {
    case LooMethod::Kind::is:
      return weighted_point(loglik_column, raw_weights(raw_log_ratios(loglik_column)));
    case LooMethod::Kind::tis:
      return weighted_point(loglik_column,
                            truncate_weights(raw_log_ratios(loglik_column), method.truncation_exponent));
    case LooMethod::Kind::psis:
      return psis_point(loglik_column, method);
  }
  fail(Errc::invalid_argument, "unknown LOO method");
}

ElpdResult make_loo_result(const LooMethod& method, std::span<const LooPoint> points,
                           std::size_t draws) {
  ElpdResult r;
  r.method = method_of(method);
  r.draws = draws;
  r.pointwise.kind = PointwiseKind::elpd_loo;
  r.pointwise.values.reserve(points.size());
  r.lpd_pointwise.reserve(points.size());
  r.p_eff_pointwise.reserve(points.size());
  for (const LooPoint& p : points) {
    r.pointwise.values.push_back(p.elpd);
    r.lpd_pointwise.push_back(p.lpd);
    r.p_eff_pointwise.push_back(p.lpd - p.elpd);
  }
  if (method.kind == LooMethod::Kind::psis) {
    r.k_hats.reserve(points.size());
    for (const LooPoint& p : points) r.k_hats.push_back(p.k_hat);
  }
  r.total = r.pointwise.total();
  const double lpd_total = std::accumulate(r.lpd_pointwise.begin(), r.lpd_pointwise.end(), 0.0);
  r.p_eff = lpd_total - r.total;
  r.ic_scale = -2.0 * r.total;
  r.se_total = se_or_zero(r.pointwise.values);
  r.se_p_eff = se_or_zero(r.p_eff_pointwise);
  return r;
}

ElpdResult elpd_loo(const LogLikMatrix& m, const LooMethod& method, std::size_t threads) {
  std::vector<LooPoint> points(m.points());
  parallel_for(m.points(), threads, [&](std::size_t j) { points[j] = loo_point(m.column(j), method); });
  return make_loo_result(method, points, m.draws());
}

WaicPoint waic_point(std::span<const double> loglik_column) {
  return {log_mean_exp(loglik_column), sample_variance(loglik_column)};
}

ElpdResult make_waic_result(std::span<const WaicPoint> points, std::size_t draws) {
  ElpdResult r;
  r.method = Method::waic;
  r.draws = draws;
  r.pointwise.kind = PointwiseKind::elpd_waic;
  for (const WaicPoint& p : points) {
    r.pointwise.values.push_back(p.lpd - p.variance);
    r.lpd_pointwise.push_back(p.lpd);
    r.waic_variance_terms.push_back(p.variance);
  }
  r.p_eff_pointwise = r.waic_variance_terms;
  r.total = r.pointwise.total();
  r.p_eff = std::accumulate(r.waic_variance_terms.begin(), r.waic_variance_terms.end(), 0.0);
  r.ic_scale = -2.0 * r.total;
  r.se_total = se_or_zero(r.pointwise.values);
  r.se_p_eff = se_or_zero(r.waic_variance_terms);
  return r;
}

ElpdResult waic(const LogLikMatrix& m, std::size_t threads) {
  std::vector<WaicPoint> points(m.points());
  parallel_for(m.points(), threads, [&](std::size_t j) { points[j] = waic_point(m.column(j)); });
  return make_waic_result(points, m.draws());
}

std::size_t waic_terms_above_threshold(const ElpdResult& r) {
  std::size_t count = 0;
  for (double v : r.waic_variance_terms) count += v > kWaicVarianceThreshold ? 1 : 0;
  return count;
}

double se_of(std::span<const double> values) {
  if (values.size() < 2) {
    fail(Errc::degenerate_sample_size, "standard error needs at least 2 pointwise values, got " +
                                           std::to_string(values.size()));
  }
  return std::sqrt(static_cast<double>(values.size()) * sample_variance(values));
}

ComparisonResult compare(const ElpdResult& a, const ElpdResult& b) {
  const auto& va = a.pointwise.values;
  const auto& vb = b.pointwise.values;
  if (va.size() != vb.size()) {
    fail(Errc::length_mismatch, "cannot compare results over " + std::to_string(va.size()) +
                                    " and " + std::to_string(vb.size()) + " points");
  }
  ComparisonResult c;
  c.pointwise_diff.resize(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) c.pointwise_diff[i] = vb[i] - va[i];
  c.elpd_diff = std::accumulate(c.pointwise_diff.begin(), c.pointwise_diff.end(), 0.0);
  c.se_diff = se_or_zero(c.pointwise_diff);
  return c;
}

double bayesian_bootstrap_se(std::span<const double> pointwise, std::size_t replicates,
                             std::uint64_t seed, std::size_t threads) {
  if (replicates < 2) {
    fail(Errc::invalid_replicates, "Bayesian bootstrap needs at least 2 replicates, got " +
                                       std::to_string(replicates));
  }
  if (pointwise.empty()) fail(Errc::empty_input, "no pointwise values to bootstrap");
  const double n = static_cast<double>(pointwise.size());
  const double center = pointwise.front();
  std::vector<double> totals(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    Rng rng = Rng::stream(seed, r);
    // Normalized unit exponentials are a flat Dirichlet draw.
    double weight_sum = 0.0;
    double weighted = 0.0;
    for (double x : pointwise) {
      const double w = rng.exponential();
      weight_sum += w;
      weighted += w * (x - center);
    }
    totals[r] = n * (center + weighted / weight_sum);
  });
  return std::sqrt(sample_variance(totals));
}

}  // namespace elpd
