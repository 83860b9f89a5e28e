#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "elpd/estimators.hpp"
#include "json.hpp"

namespace elpd::cli {

struct RowLabels {
  std::string elpd;
  std::string p_eff;
  std::string ic;
};

RowLabels labels_for(Method method);

struct BootstrapSummary {
  double se = 0.0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
};

struct ReportOptions {
  bool pointwise = false;
  std::optional<BootstrapSummary> bootstrap;
};

// Values are printed with one decimal, the precision the report promises to
// match against the machine-readable document.
std::string format_estimate(double value);

// Estimate/SE table followed by the diagnostic status lines.
std::string render_report(const ElpdResult& r, const ReportOptions& options);

nlohmann::json to_json(const ElpdResult& r, const ReportOptions& options);

std::string render_comparison(const ComparisonResult& c, Method method);

nlohmann::json comparison_json(const ComparisonResult& c, Method method, const ElpdResult& a,
                               const ElpdResult& b);

}  // namespace elpd::cli
