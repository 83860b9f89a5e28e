#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "elpd/estimators.hpp"
#include "elpd/loglik.hpp"

namespace elpd {

// Fold id (1..K) for each data point.
struct FoldAssignment {
  std::vector<int> fold_of;
  int folds = 0;
  std::uint64_t seed = 0;
  std::optional<std::vector<std::string>> strata;

  std::size_t points() const { return fold_of.size(); }
  // 0-based indices of the points in fold k, ascending.
  std::vector<std::size_t> members(int fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

// Draws from the posterior fitted without fold `fold`.
struct FoldLogLik {
  int fold = 0;
  // S_k x |fold| log p(y_i | theta^{k,s}), columns in ascending point order.
  LogLikMatrix holdout;
  // S_k x n over all points; needed for the bias correction.
  std::optional<LogLikMatrix> full;
};

// Randomly permutes the points (within each stratum when strata are given)
// and deals them to folds in turn, so fold sizes differ by at most one,
// overall and within every stratum. Deterministic for a seed.
// Throws Error(invalid_k) unless 2 <= K <= n.
FoldAssignment make_folds(std::size_t n, int folds, std::uint64_t seed,
                          std::optional<std::vector<std::string>> strata = std::nullopt);

// Throws Error(coverage) if a point is missing, duplicated, or a fold's
// holdout width does not match its member count.
void check_coverage(std::span<const FoldLogLik> folds, const FoldAssignment& assignment);

// elpd_i = log_mean_exp of point i's holdout column. p_eff = lpd(full) - total
// when `full` is given, otherwise undefined.
ElpdResult elpd_kfold(std::span<const FoldLogLik> folds, const FoldAssignment& assignment,
                      const LogLikMatrix* full = nullptr);

// First-order correction for the smaller training sets:
//   corrected_i = elpd_i + full_lpd_i - (1/K) sum_k per_fold_full_lpd[k]_i
// where per_fold_full_lpd[k] is the lpd of all n points under fold k's
// training posterior. Throws Error(length_mismatch).
ElpdResult burman_correction(const ElpdResult& kfold, const PointwiseValues& full_lpd,
                             std::span<const std::vector<double>> per_fold_full_lpd);

// Corrected result computed directly from fold draws that carry `full`.
ElpdResult elpd_kfold_corrected(std::span<const FoldLogLik> folds, const FoldAssignment& assignment,
                                const LogLikMatrix& full);

struct RepeatedKfold {
  std::vector<double> totals;
  double mean_total = 0.0;
  double sd_total = 0.0;
};

// Runs `evaluate` on assignments from seeds seed, seed + 1, ... and
// summarizes the totals.
RepeatedKfold repeated_kfold(std::size_t n, int folds, std::size_t repetitions, std::uint64_t seed,
                             const std::function<ElpdResult(const FoldAssignment&)>& evaluate);

// Two-column table "point_index,fold_id" with 1-based point indices.
void write_fold_table(std::ostream& out, const FoldAssignment& assignment);
FoldAssignment read_fold_table(std::istream& in);

}  // namespace elpd
