#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace elpd {

enum class PointwiseKind { lpd, elpd_loo, elpd_waic, p_waic_term, elpd_kfold };

std::string_view to_string(PointwiseKind kind);

// One value per data point, in data order.
struct PointwiseValues {
  PointwiseKind kind = PointwiseKind::lpd;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double total() const;
};

// S x n matrix of log p(y_i | theta^s): rows are posterior draws, columns are
// data points. Stored column-major so each point's draws are contiguous.
//
// Every entry is finite, S >= 2 and n >= 1. Zero-likelihood draws (-inf) are
// rejected at construction.
class LogLikMatrix {
 public:
  // Rows are draws. Throws Error(non_rectangular | empty_matrix | non_finite).
  static LogLikMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                std::vector<std::string> chain_ids = {});
  // column_major.size() must equal draws * points.
  static LogLikMatrix from_columns(std::size_t draws, std::vector<double> column_major,
                                   std::vector<std::string> chain_ids = {});

  std::size_t draws() const { return draws_; }
  std::size_t points() const { return points_; }

  std::span<const double> column(std::size_t point) const {
    return {values_.data() + point * draws_, draws_};
  }
  double at(std::size_t draw, std::size_t point) const { return values_[point * draws_ + draw]; }

  // Per-draw chain labels; empty when the source had none. Not used by any
  // estimator.
  const std::vector<std::string>& chain_ids() const { return chain_ids_; }

  std::span<const double> column_major() const { return values_; }

 private:
  LogLikMatrix(std::size_t draws, std::size_t points, std::vector<double> values,
               std::vector<std::string> chain_ids);

  std::size_t draws_ = 0;
  std::size_t points_ = 0;
  std::vector<double> values_;
  std::vector<std::string> chain_ids_;
};

LogLikMatrix validate_matrix(const std::vector<std::vector<double>>& raw,
                             std::vector<std::string> chain_ids = {});

// log(sum_s exp(v_s)), max-shifted. Throws Error(empty_input).
double log_sum_exp(std::span<const double> v);

// log((1/S) sum_s exp(v_s)).
double log_mean_exp(std::span<const double> v);

// log(sum_s w_s exp(v_s) / sum_s w_s) for nonnegative linear weights.
double log_mean_exp(std::span<const double> v, std::span<const double> weights);

// Same as above with weights given on the log scale; this is the form the
// importance-sampling estimators use.
double log_weighted_mean_exp(std::span<const double> v, std::span<const double> log_weights);

// Unbiased (S - 1 denominator) sample variance.
double sample_variance(std::span<const double> v);

// Log pointwise predictive density: lpd_i = log_mean_exp(column i).
PointwiseValues lpd(const LogLikMatrix& m, std::size_t threads = 0);

}  // namespace elpd
