#include "elpd/loglik.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "elpd/error.hpp"
#include "elpd/parallel.hpp"

namespace elpd {

std::string_view to_string(PointwiseKind kind) {
  switch (kind) {
    case PointwiseKind::lpd: return "lpd";
    case PointwiseKind::elpd_loo: return "elpd_loo";
    case PointwiseKind::elpd_waic: return "elpd_waic";
    case PointwiseKind::p_waic_term: return "p_waic_term";
    case PointwiseKind::elpd_kfold: return "elpd_kfold";
  }
  return "unknown";
}

double PointwiseValues::total() const {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

LogLikMatrix::LogLikMatrix(std::size_t draws, std::size_t points, std::vector<double> values,
                           std::vector<std::string> chain_ids)
    : draws_(draws), points_(points), values_(std::move(values)), chain_ids_(std::move(chain_ids)) {
  if (draws_ < 2 || points_ < 1) {
    fail(Errc::empty_matrix, "need at least 2 draws and 1 point, got " + std::to_string(draws_) +
                                 " x " + std::to_string(points_));
  }
  if (!chain_ids_.empty() && chain_ids_.size() != draws_) {
    fail(Errc::length_mismatch, "chain id count " + std::to_string(chain_ids_.size()) +
                                    " does not match draw count " + std::to_string(draws_));
  }
  for (std::size_t j = 0; j < points_; ++j) {
    for (std::size_t s = 0; s < draws_; ++s) {
      if (!std::isfinite(values_[j * draws_ + s])) {
        Error err(Errc::non_finite, "entry (" + std::to_string(s) + ", " + std::to_string(j) +
                                        ") is not finite");
        err.row = s;
        err.column = j;
        throw err;
      }
    }
  }
}

LogLikMatrix LogLikMatrix::from_rows(const std::vector<std::vector<double>>& rows,
                                     std::vector<std::string> chain_ids) {
  const std::size_t draws = rows.size();
  const std::size_t points = draws == 0 ? 0 : rows.front().size();
  for (std::size_t s = 0; s < draws; ++s) {
    if (rows[s].size() != points) {
      fail(Errc::non_rectangular, "row " + std::to_string(s) + " has " +
                                      std::to_string(rows[s].size()) + " entries, expected " +
                                      std::to_string(points));
    }
  }
  std::vector<double> values(draws * points);
  for (std::size_t s = 0; s < draws; ++s) {
    for (std::size_t j = 0; j < points; ++j) values[j * draws + s] = rows[s][j];
  }
  return LogLikMatrix(draws, points, std::move(values), std::move(chain_ids));
}

LogLikMatrix LogLikMatrix::from_columns(std::size_t draws, std::vector<double> column_major,
                                        std::vector<std::string> chain_ids) {
  if (draws == 0 || column_major.size() % draws != 0) {
    fail(Errc::non_rectangular, "column-major buffer of size " +
                                    std::to_string(column_major.size()) +
                                    " is not a multiple of the draw count");
  }
  const std::size_t points = column_major.size() / draws;
  return LogLikMatrix(draws, points, std::move(column_major), std::move(chain_ids));
}

LogLikMatrix validate_matrix(const std::vector<std::vector<double>>& raw,
                             std::vector<std::string> chain_ids) {
  return LogLikMatrix::from_rows(raw, std::move(chain_ids));
}

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) fail(Errc::empty_input, "log_sum_exp of an empty vector");
  const double peak = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - peak);
  return peak + std::log(sum);
}

double log_mean_exp(std::span<const double> v) {
  if (v.empty()) fail(Errc::empty_input, "log_mean_exp of an empty vector");
  const double peak = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - peak);
  // Dividing before the log keeps constant inputs exact.
  return peak + std::log(sum / static_cast<double>(v.size()));
}

double log_mean_exp(std::span<const double> v, std::span<const double> weights) {
  if (v.empty()) fail(Errc::empty_input, "log_mean_exp of an empty vector");
  if (weights.size() != v.size()) {
    fail(Errc::length_mismatch, "weights length " + std::to_string(weights.size()) +
                                    " differs from values length " + std::to_string(v.size()));
  }
  double weight_sum = 0.0;
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < v.size(); ++s) {
    if (!(weights[s] >= 0.0)) fail(Errc::invalid_argument, "weights must be nonnegative");
    weight_sum += weights[s];
    if (weights[s] > 0.0) peak = std::max(peak, v[s]);
  }
  if (!(weight_sum > 0.0)) fail(Errc::invalid_argument, "weights must have a positive sum");
  double sum = 0.0;
  for (std::size_t s = 0; s < v.size(); ++s) {
    if (weights[s] > 0.0) sum += weights[s] * std::exp(v[s] - peak);
  }
  return peak + std::log(sum / weight_sum);
}

double log_weighted_mean_exp(std::span<const double> v, std::span<const double> log_weights) {
  if (v.empty()) fail(Errc::empty_input, "log_weighted_mean_exp of an empty vector");
  if (log_weights.size() != v.size()) {
    fail(Errc::length_mismatch, "weights length " + std::to_string(log_weights.size()) +
                                    " differs from values length " + std::to_string(v.size()));
  }
  const double value_peak = *std::max_element(v.begin(), v.end());
  const double weight_peak = *std::max_element(log_weights.begin(), log_weights.end());
  double numerator = 0.0;
  double denominator = 0.0;
  for (std::size_t s = 0; s < v.size(); ++s) {
    const double w = std::exp(log_weights[s] - weight_peak);
    numerator += w * std::exp(v[s] - value_peak);
    denominator += w;
  }
  if (numerator > std::numeric_limits<double>::min()) {
    return value_peak + std::log(numerator / denominator);
  }
  // Mass sits where values and weights peak far apart; shift jointly instead.
  double joint_peak = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < v.size(); ++s) joint_peak = std::max(joint_peak, v[s] + log_weights[s]);
  numerator = 0.0;
  for (std::size_t s = 0; s < v.size(); ++s) numerator += std::exp(v[s] + log_weights[s] - joint_peak);
  return joint_peak + std::log(numerator) - weight_peak - std::log(denominator);
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) fail(Errc::degenerate_sample_size, "sample variance needs at least 2 values");
  const double n = static_cast<double>(v.size());
  // Shifting by the first value makes constant inputs give exactly zero.
  const double shift = v.front();
  double mean = 0.0;
  for (double x : v) mean += x - shift;
  mean /= n;
  double sum_sq = 0.0;
  double sum_dev = 0.0;
  for (double x : v) {
    const double d = (x - shift) - mean;
    sum_sq += d * d;
    sum_dev += d;
  }
  // Corrected two-pass formula.
  return (sum_sq - sum_dev * sum_dev / n) / (n - 1.0);
}

PointwiseValues lpd(const LogLikMatrix& m, std::size_t threads) {
  PointwiseValues out{PointwiseKind::lpd, std::vector<double>(m.points())};
  parallel_for(m.points(), threads, [&](std::size_t j) { out.values[j] = log_mean_exp(m.column(j)); });
  return out;
}

}  // namespace elpd
