#include "report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>
#include <vector>

#include "elpd/psis.hpp"

namespace elpd::cli {
namespace {

struct KhatCounts {
  std::array<std::size_t, 4> by_level{};
  std::size_t undefined = 0;
};

KhatCounts count_k_hats(const ElpdResult& r) {
  KhatCounts counts;
  for (const auto& k : r.k_hats) {
    const DiagnosticFlag flag = diagnose(k);
    ++counts.by_level[static_cast<std::size_t>(flag.level)];
    if (flag.degenerate()) ++counts.undefined;
  }
  return counts;
}

std::string percent(std::size_t count, std::size_t total) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.1f%%", 100.0 * static_cast<double>(count) /
                                                      static_cast<double>(std::max<std::size_t>(total, 1)));
  return buffer;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string format_pointwise(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.6f", value);
  return buffer;
}

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

void k_hat_status(std::ostringstream& out, const ElpdResult& r) {
  if (r.method != Method::psis_loo) {
    out << "Pareto k diagnostics are not computed for " << to_string(r.method) << ".\n";
    return;
  }
  const KhatCounts counts = count_k_hats(r);
  const std::size_t n = r.k_hats.size();
  const std::size_t good = counts.by_level[0];
  if (good == n) {
    out << "All Pareto k estimates are good (k < 0.5).\n";
  } else {
    out << "Pareto k diagnostic values:\n";
    out << "                          Count    Pct\n";
    const std::array<const char*, 4> rows = {
        "(-Inf, 0.5)  (good)    ", "[0.5, 0.7]   (ok)      ", "(0.7, 1]     (bad)     ",
        "(1, Inf)     (very bad)"};
    for (std::size_t level = 0; level < rows.size(); ++level) {
      out << rows[level] << pad_left(std::to_string(counts.by_level[level]), 7)
          << pad_left(percent(counts.by_level[level], n), 7) << '\n';
    }
    const std::size_t ok = counts.by_level[1];
    const std::size_t high = counts.by_level[2];
    const std::size_t severe = counts.by_level[3];
    if (ok > 0) {
      out << "Warning: " << ok << " (" << percent(ok, n)
          << ") Pareto k estimates are between 0.5 and 0.7; the estimate is usable but converges slowly.\n";
    }
    if (high > 0) {
      out << "Warning: " << high << " (" << percent(high, n)
          << ") Pareto k estimates are between 0.7 and 1; sample directly from the leave-one-out "
             "posteriors for these points or use K-fold cross-validation.\n";
    }
    if (severe > 0) {
      out << "Warning: " << severe << " (" << percent(severe, n)
          << ") Pareto k estimates exceed 1; the importance ratios have no finite mean for these "
             "points. Use K-fold cross-validation or a more robust model.\n";
    }
  }
  if (counts.undefined > 0) {
    out << "Note: " << counts.undefined
        << " points had a degenerate ratio tail (k undefined, counted as good).\n";
  }
}

void waic_status(std::ostringstream& out, const ElpdResult& r) {
  const std::size_t above = waic_terms_above_threshold(r);
  if (above == 0) {
    out << "All pointwise variance terms are at most 0.4.\n";
  } else {
    out << "Warning: " << above << " (" << percent(above, r.waic_variance_terms.size())
        << ") pointwise variance terms exceed 0.4; p_waic is unreliable, try PSIS-LOO.\n";
  }
}

}  // namespace

RowLabels labels_for(Method method) {
  switch (method) {
    case Method::is_loo:
    case Method::tis_loo:
    case Method::psis_loo:
      return {"elpd_loo", "p_loo", "looic"};
    case Method::waic:
      return {"elpd_waic", "p_waic", "waic"};
    case Method::kfold:
      return {"elpd_kfold", "p_kfold", "kfoldic"};
  }
  return {"elpd", "p_eff", "ic"};
}

std::string format_estimate(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.1f", value);
  std::string s = buffer;
  if (s == "-0.0") s = "0.0";
  return s;
}

std::string render_report(const ElpdResult& r, const ReportOptions& options) {
  const RowLabels labels = labels_for(r.method);
  std::ostringstream out;
  out << "Computed from " << r.draws << " by " << r.pointwise.size() << " log-likelihood matrix";
  if (r.bias_corrected) out << " (bias corrected)";
  out << "\n\n";

  struct Row {
    std::string label;
    std::string estimate;
    std::string se;
  };
  std::vector<Row> rows;
  rows.push_back({labels.elpd, format_estimate(r.total), format_estimate(r.se_total)});
  rows.push_back({labels.p_eff, r.p_eff ? format_estimate(*r.p_eff) : "NA",
                  r.se_p_eff ? format_estimate(*r.se_p_eff) : "NA"});
  rows.push_back({labels.ic, format_estimate(r.ic_scale), format_estimate(2.0 * r.se_total)});

  std::size_t label_width = 0;
  std::size_t estimate_width = std::string("Estimate").size();
  std::size_t se_width = std::string("SE").size();
  for (const Row& row : rows) {
    label_width = std::max(label_width, row.label.size());
    estimate_width = std::max(estimate_width, row.estimate.size());
    se_width = std::max(se_width, row.se.size());
  }
  out << std::string(label_width, ' ') << ' ' << pad_left("Estimate", estimate_width) << ' '
      << pad_left("SE", se_width) << '\n';
  for (const Row& row : rows) {
    out << pad_right(row.label, label_width) << ' ' << pad_left(row.estimate, estimate_width) << ' '
        << pad_left(row.se, se_width) << '\n';
  }
  out << '\n';

  if (r.method == Method::waic) {
    waic_status(out, r);
  } else if (r.method != Method::kfold) {
    k_hat_status(out, r);
  }

  if (options.bootstrap) {
    out << "Bayesian bootstrap SE of " << labels.elpd << ": " << format_estimate(options.bootstrap->se)
        << " (" << options.bootstrap->replicates << " replicates, seed " << options.bootstrap->seed
        << ")\n";
  }

  if (options.pointwise) {
    out << "\npoint " << pad_left(labels.elpd, 14) << ' ' << pad_left(labels.p_eff, 14);
    const bool has_k = !r.k_hats.empty();
    if (has_k) out << ' ' << pad_left("k_hat", 10);
    out << '\n';
    for (std::size_t i = 0; i < r.pointwise.size(); ++i) {
      out << pad_left(std::to_string(i + 1), 5) << ' ' << pad_left(format_pointwise(r.pointwise.values[i]), 14)
          << ' '
          << pad_left(r.p_eff_pointwise.empty() ? "NA" : format_pointwise(r.p_eff_pointwise[i]), 14);
      if (has_k) {
        char buffer[32];
        if (r.k_hats[i]) {
          std::snprintf(buffer, sizeof buffer, "%.3f", *r.k_hats[i]);
        } else {
          std::snprintf(buffer, sizeof buffer, "NA");
        }
        out << ' ' << pad_left(buffer, 10);
      }
      out << '\n';
    }
  }
  return out.str();
}

nlohmann::json to_json(const ElpdResult& r, const ReportOptions& options) {
  const RowLabels labels = labels_for(r.method);
  nlohmann::json doc;
  doc["method"] = std::string(to_string(r.method));
  doc["draws"] = r.draws;
  doc["points"] = r.pointwise.size();
  doc["bias_corrected"] = r.bias_corrected;
  doc["labels"] = {{"elpd", labels.elpd}, {"p_eff", labels.p_eff}, {"ic", labels.ic}};
  doc["estimates"] = {
      {"elpd", {{"estimate", r.total}, {"se", r.se_total}}},
      {"p_eff", {{"estimate", optional_number(r.p_eff)}, {"se", optional_number(r.se_p_eff)}}},
      {"ic", {{"estimate", r.ic_scale}, {"se", 2.0 * r.se_total}}},
  };

  nlohmann::json diagnostics = nlohmann::json::object();
  if (r.method == Method::psis_loo) {
    const KhatCounts counts = count_k_hats(r);
    diagnostics["k_hat_counts"] = {{"good", counts.by_level[0]},
                                   {"ok", counts.by_level[1]},
                                   {"warn_high", counts.by_level[2]},
                                   {"severe", counts.by_level[3]},
                                   {"undefined", counts.undefined}};
  }
  if (r.method == Method::waic) {
    diagnostics["waic_variance_threshold"] = kWaicVarianceThreshold;
    diagnostics["waic_terms_above_threshold"] = waic_terms_above_threshold(r);
  }
  doc["diagnostics"] = diagnostics;

  if (options.bootstrap) {
    doc["bootstrap"] = {{"se", options.bootstrap->se},
                        {"replicates", options.bootstrap->replicates},
                        {"seed", options.bootstrap->seed}};
  }

  nlohmann::json pointwise;
  pointwise["elpd"] = r.pointwise.values;
  pointwise["p_eff"] = r.p_eff_pointwise;
  pointwise["lpd"] = r.lpd_pointwise;
  if (r.method == Method::psis_loo) {
    nlohmann::json k = nlohmann::json::array();
    for (const auto& v : r.k_hats) k.push_back(optional_number(v));
    pointwise["k_hat"] = k;
  }
  if (r.method == Method::waic) pointwise["waic_variance"] = r.waic_variance_terms;
  doc["pointwise"] = pointwise;
  return doc;
}

std::string render_comparison(const ComparisonResult& c, Method method) {
  std::ostringstream out;
  const std::string diff = format_estimate(c.elpd_diff);
  const std::string se = format_estimate(c.se_diff);
  const std::size_t width = std::max<std::size_t>({std::string("elpd_diff").size(), diff.size()});
  const std::size_t se_width = std::max<std::size_t>(se.size(), 9);
  out << pad_left("elpd_diff", width) << ' ' << pad_left("SE", se_width) << '\n';
  out << pad_left(diff, width) << ' ' << pad_left(se, se_width) << '\n';
  out << "\nDifference of " << labels_for(method).elpd
      << " (second input minus first); positive values favor the second model.\n";
  return out.str();
}

nlohmann::json comparison_json(const ComparisonResult& c, Method method, const ElpdResult& a,
                               const ElpdResult& b) {
  nlohmann::json doc;
  doc["method"] = std::string(to_string(method));
  doc["elpd_diff"] = c.elpd_diff;
  doc["se_diff"] = c.se_diff;
  doc["sign_convention"] = "second minus first; positive favors the second model";
  doc["models"] = nlohmann::json::array({
      {{"elpd", a.total}, {"se", a.se_total}},
      {{"elpd", b.total}, {"se", b.se_total}},
  });
  doc["pointwise_diff"] = c.pointwise_diff;
  return doc;
}

}  // namespace elpd::cli
