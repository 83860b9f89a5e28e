#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "elpd/loglik.hpp"
#include "elpd/psis.hpp"

namespace elpd {

enum class Method { is_loo, tis_loo, psis_loo, waic, kfold };

std::string_view to_string(Method method);

// Which importance weights elpd_loo uses.
struct LooMethod {
  enum class Kind { is, tis, psis } kind = Kind::psis;
  double tail_fraction = 0.2;
  double truncation_exponent = 0.75;

  static LooMethod is() { return {Kind::is, 0.2, 1.0}; }
  static LooMethod tis(double exponent = 0.5) { return {Kind::tis, 0.2, exponent}; }
  static LooMethod psis(double tail_fraction = 0.2, double exponent = 0.75) {
    return {Kind::psis, tail_fraction, exponent};
  }
};

// Sum of pointwise contributions with standard errors and diagnostics.
struct ElpdResult {
  Method method = Method::psis_loo;
  PointwiseValues pointwise;
  double total = 0.0;
  // Effective number of parameters; undefined for K-fold without a
  // full-data matrix.
  std::optional<double> p_eff;
  double ic_scale = 0.0;
  double se_total = 0.0;
  std::optional<double> se_p_eff;
  // Per-point contributions to p_eff (lpd_i - elpd_i, or the WAIC variance
  // term); empty when p_eff is undefined.
  std::vector<double> p_eff_pointwise;
  // Per-point lpd under the full posterior; empty when unavailable.
  std::vector<double> lpd_pointwise;
  // PSIS only; empty otherwise.
  std::vector<std::optional<double>> k_hats;
  // WAIC only; empty otherwise.
  std::vector<double> waic_variance_terms;
  bool bias_corrected = false;
  std::size_t draws = 0;
};

struct ComparisonResult {
  // Second model minus first: positive values favor the second model.
  double elpd_diff = 0.0;
  double se_diff = 0.0;
  std::vector<double> pointwise_diff;
};

// Per-point pieces of a LOO estimate, computed from one log-likelihood column.
struct LooPoint {
  double elpd = 0.0;
  double lpd = 0.0;
  std::optional<double> k_hat;
};

LooPoint loo_point(std::span<const double> loglik_column, const LooMethod& method);

// Assembles totals, p_eff and standard errors from per-point pieces.
ElpdResult make_loo_result(const LooMethod& method, std::span<const LooPoint> points,
                           std::size_t draws);

// Importance-sampling LOO: elpd_i = log(sum_s w_s p_s / sum_s w_s) with the
// weights chosen by `method`.
ElpdResult elpd_loo(const LogLikMatrix& m, const LooMethod& method = LooMethod::psis(),
                    std::size_t threads = 0);

// WAIC pieces for one column: lpd_i and the sample variance of the column.
struct WaicPoint {
  double lpd = 0.0;
  double variance = 0.0;
};

WaicPoint waic_point(std::span<const double> loglik_column);
ElpdResult make_waic_result(std::span<const WaicPoint> points, std::size_t draws);

// elpd_waic = lpd - p_waic with p_waic the sum of per-point sample variances.
ElpdResult waic(const LogLikMatrix& m, std::size_t threads = 0);

// A pointwise variance term above this marks WAIC as unreliable.
inline constexpr double kWaicVarianceThreshold = 0.4;

std::size_t waic_terms_above_threshold(const ElpdResult& r);

// sqrt(n * sample_variance(values)). Throws Error(degenerate_sample_size) for
// n < 2.
double se_of(std::span<const double> values);
inline double se_of(const PointwiseValues& p) { return se_of(p.values); }

// Paired difference b - a. Throws Error(length_mismatch).
ComparisonResult compare(const ElpdResult& a, const ElpdResult& b);

// Standard deviation of n * sum_i w_i x_i over Dirichlet(1, ..., 1) draws of w.
// Replicate r uses Rng::stream(seed, r), so the value does not depend on the
// thread count. Throws Error(invalid_replicates) when replicates < 2.
double bayesian_bootstrap_se(std::span<const double> pointwise, std::size_t replicates,
                             std::uint64_t seed, std::size_t threads = 0);

inline constexpr std::size_t kDefaultBootstrapReplicates = 1000;

}  // namespace elpd
