#include "elpd/kfold.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "elpd/error.hpp"
#include "elpd/random.hpp"

namespace elpd {

std::vector<std::size_t> FoldAssignment::members(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(folds), 0);
  for (int f : fold_of) ++sizes[static_cast<std::size_t>(f - 1)];
  return sizes;
}

FoldAssignment make_folds(std::size_t n, int folds, std::uint64_t seed,
                          std::optional<std::vector<std::string>> strata) {
  if (folds < 2 || static_cast<std::size_t>(folds) > n) {
    fail(Errc::invalid_k, "need 2 <= K <= n, got K = " + std::to_string(folds) +
                              ", n = " + std::to_string(n));
  }
  if (strata && strata->size() != n) {
    fail(Errc::length_mismatch, "strata labels cover " + std::to_string(strata->size()) +
                                    " points, expected " + std::to_string(n));
  }

  // Group points by stratum label in order of first appearance.
  std::vector<std::vector<std::size_t>> groups;
  if (strata) {
    std::map<std::string, std::size_t> group_of;
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, inserted] = group_of.try_emplace((*strata)[i], groups.size());
      if (inserted) groups.emplace_back();
      groups[it->second].push_back(i);
    }
  } else {
    groups.emplace_back(n);
    std::iota(groups.front().begin(), groups.front().end(), std::size_t{0});
  }

  Rng rng(seed);
  FoldAssignment out;
  out.fold_of.assign(n, 0);
  out.folds = folds;
  out.seed = seed;
  out.strata = std::move(strata);

  // Dealing continues where the previous stratum stopped, which keeps the
  // overall fold sizes balanced as well.
  std::size_t dealt = 0;
  const auto k = static_cast<std::size_t>(folds);
  for (auto& group : groups) {
    for (std::size_t i = group.size(); i > 1; --i) {
      std::swap(group[i - 1], group[rng.below(i)]);
    }
    for (std::size_t point : group) {
      out.fold_of[point] = static_cast<int>(dealt % k) + 1;
      ++dealt;
    }
  }
  return out;
}

void check_coverage(std::span<const FoldLogLik> folds, const FoldAssignment& assignment) {
  const std::size_t n = assignment.points();
  std::vector<int> seen(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const int f = assignment.fold_of[i];
    if (f < 1 || f > assignment.folds) {
      fail(Errc::coverage, "point " + std::to_string(i + 1) + " has no valid fold");
    }
  }
  for (const FoldLogLik& fold : folds) {
    const auto members = assignment.members(fold.fold);
    if (members.size() != fold.holdout.points()) {
      fail(Errc::coverage, "fold " + std::to_string(fold.fold) + " holds out " +
                               std::to_string(fold.holdout.points()) + " columns but has " +
                               std::to_string(members.size()) + " assigned points");
    }
    for (std::size_t i : members) ++seen[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i] == 0) fail(Errc::coverage, "point " + std::to_string(i + 1) + " is in no supplied fold");
    if (seen[i] > 1) fail(Errc::coverage, "point " + std::to_string(i + 1) + " is held out more than once");
  }
}

ElpdResult elpd_kfold(std::span<const FoldLogLik> folds, const FoldAssignment& assignment,
                      const LogLikMatrix* full) {
  check_coverage(folds, assignment);
  const std::size_t n = assignment.points();
  ElpdResult r;
  r.method = Method::kfold;
  r.pointwise.kind = PointwiseKind::elpd_kfold;
  r.pointwise.values.assign(n, 0.0);
  for (const FoldLogLik& fold : folds) {
    const auto members = assignment.members(fold.fold);
    for (std::size_t c = 0; c < members.size(); ++c) {
      r.pointwise.values[members[c]] = log_mean_exp(fold.holdout.column(c));
    }
    r.draws = std::max(r.draws, fold.holdout.draws());
  }
  r.total = r.pointwise.total();
  r.ic_scale = -2.0 * r.total;
  r.se_total = n < 2 ? 0.0 : se_of(r.pointwise.values);
  if (full) {
    if (full->points() != n) {
      fail(Errc::length_mismatch, "full-data matrix has " + std::to_string(full->points()) +
                                      " points, expected " + std::to_string(n));
    }
    r.lpd_pointwise = lpd(*full).values;
    r.p_eff_pointwise.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.p_eff_pointwise[i] = r.lpd_pointwise[i] - r.pointwise.values[i];
    r.p_eff = std::accumulate(r.p_eff_pointwise.begin(), r.p_eff_pointwise.end(), 0.0);
    r.se_p_eff = n < 2 ? 0.0 : se_of(r.p_eff_pointwise);
  }
  return r;
}

ElpdResult burman_correction(const ElpdResult& kfold, const PointwiseValues& full_lpd,
                             std::span<const std::vector<double>> per_fold_full_lpd) {
  const std::size_t n = kfold.pointwise.size();
  if (full_lpd.size() != n) {
    fail(Errc::length_mismatch, "full lpd has " + std::to_string(full_lpd.size()) +
                                    " points, expected " + std::to_string(n));
  }
  if (per_fold_full_lpd.empty()) fail(Errc::length_mismatch, "no per-fold lpd vectors given");
  for (const auto& v : per_fold_full_lpd) {
    if (v.size() != n) {
      fail(Errc::length_mismatch, "per-fold lpd has " + std::to_string(v.size()) +
                                      " points, expected " + std::to_string(n));
    }
  }
  const double folds = static_cast<double>(per_fold_full_lpd.size());
  ElpdResult r = kfold;
  for (std::size_t i = 0; i < n; ++i) {
    double fold_mean = 0.0;
    for (const auto& v : per_fold_full_lpd) fold_mean += v[i];
    fold_mean /= folds;
    r.pointwise.values[i] += full_lpd.values[i] - fold_mean;
  }
  r.total = r.pointwise.total();
  r.ic_scale = -2.0 * r.total;
  r.se_total = n < 2 ? 0.0 : se_of(r.pointwise.values);
  if (!r.lpd_pointwise.empty()) {
    for (std::size_t i = 0; i < n; ++i) r.p_eff_pointwise[i] = r.lpd_pointwise[i] - r.pointwise.values[i];
    r.p_eff = std::accumulate(r.p_eff_pointwise.begin(), r.p_eff_pointwise.end(), 0.0);
    r.se_p_eff = n < 2 ? 0.0 : se_of(r.p_eff_pointwise);
  }
  r.bias_corrected = true;
  return r;
}

ElpdResult elpd_kfold_corrected(std::span<const FoldLogLik> folds, const FoldAssignment& assignment,
                                const LogLikMatrix& full) {
  ElpdResult base = elpd_kfold(folds, assignment, &full);
  std::vector<std::vector<double>> per_fold;
  per_fold.reserve(folds.size());
  for (const FoldLogLik& fold : folds) {
    if (!fold.full) {
      fail(Errc::invalid_argument, "fold " + std::to_string(fold.fold) +
                                       " has no full-data log-likelihood for the bias correction");
    }
    per_fold.push_back(lpd(*fold.full).values);
  }
  return burman_correction(base, PointwiseValues{PointwiseKind::lpd, base.lpd_pointwise}, per_fold);
}

RepeatedKfold repeated_kfold(std::size_t n, int folds, std::size_t repetitions, std::uint64_t seed,
                             const std::function<ElpdResult(const FoldAssignment&)>& evaluate) {
  if (repetitions == 0) fail(Errc::invalid_argument, "need at least one repetition");
  RepeatedKfold out;
  for (std::size_t r = 0; r < repetitions; ++r) {
    out.totals.push_back(evaluate(make_folds(n, folds, seed + r)).total);
  }
  out.mean_total = std::accumulate(out.totals.begin(), out.totals.end(), 0.0) /
                   static_cast<double>(repetitions);
  out.sd_total = repetitions < 2 ? 0.0 : std::sqrt(sample_variance(out.totals));
  return out;
}

void write_fold_table(std::ostream& out, const FoldAssignment& assignment) {
  out << "point_index,fold_id\n";
  for (std::size_t i = 0; i < assignment.points(); ++i) {
    out << (i + 1) << ',' << assignment.fold_of[i] << '\n';
  }
}

FoldAssignment read_fold_table(std::istream& in) {
  std::vector<std::pair<long long, long long>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (line.find_first_not_of(" \t0123456789,") != std::string::npos) {
      if (rows.empty()) continue;  // header
      Error err(Errc::parse, "line " + std::to_string(line_no) + ": expected point_index,fold_id");
      err.line = line_no;
      throw err;
    }
    std::istringstream fields(line);
    long long point = 0;
    long long fold = 0;
    char comma = 0;
    if (!(fields >> point >> comma >> fold) || comma != ',' || point < 1) {
      Error err(Errc::parse, "line " + std::to_string(line_no) + ": expected point_index,fold_id");
      err.line = line_no;
      throw err;
    }
    rows.emplace_back(point, fold);
  }
  FoldAssignment out;
  long long max_point = 0;
  for (auto [p, f] : rows) max_point = std::max(max_point, p);
  out.fold_of.assign(static_cast<std::size_t>(max_point), 0);
  for (auto [p, f] : rows) {
    int& slot = out.fold_of[static_cast<std::size_t>(p - 1)];
    if (slot != 0) fail(Errc::coverage, "point " + std::to_string(p) + " is listed twice");
    slot = static_cast<int>(f);
    out.folds = std::max(out.folds, static_cast<int>(f));
  }
  for (std::size_t i = 0; i < out.fold_of.size(); ++i) {
    if (out.fold_of[i] < 1) fail(Errc::coverage, "point " + std::to_string(i + 1) + " has no fold");
  }
  if (out.folds < 2) fail(Errc::invalid_k, "fold table must use at least 2 folds");
  return out;
}

}  // namespace elpd
