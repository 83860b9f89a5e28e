#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "elpd/error.hpp"
#include "elpd/estimators.hpp"
#include "elpd/io.hpp"
#include "elpd/kfold.hpp"
#include "report.hpp"

namespace elpd::cli {
namespace {

struct InputOptions {
  std::string format = "matrix_csv";
  std::string prefix = "log_lik";
};

struct EstimatorOptions {
  std::string method = "psis";
  double tail_fraction = 0.2;
  std::optional<double> trunc_exponent;
  std::uint64_t seed = 1;
  std::size_t bootstrap = 0;
  bool pointwise = false;
  std::string output;
  std::size_t threads = 0;
  std::size_t chunk_columns = 0;
};

io::InputSpec make_spec(const std::string& path, const InputOptions& input) {
  io::InputSpec spec;
  spec.path = path;
  const auto format = io::parse_input_format(input.format);
  if (!format) throw CLI::ValidationError("--format", "unknown input format '" + input.format + "'");
  spec.format = *format;
  spec.column_prefix = input.prefix;
  return spec;
}

// Resolves --method and the truncation exponent default (1/2 for TIS, 3/4
// for PSIS). Returns nullopt for waic.
std::optional<LooMethod> loo_method(const EstimatorOptions& o) {
  if (o.method == "waic") return std::nullopt;
  if (o.method == "is") return LooMethod::is();
  if (o.method == "tis") return LooMethod::tis(o.trunc_exponent.value_or(0.5));
  if (o.method == "psis") return LooMethod::psis(o.tail_fraction, o.trunc_exponent.value_or(0.75));
  throw CLI::ValidationError("--method", "expected one of is, tis, psis, waic");
}

void check_estimator_options(const EstimatorOptions& o) {
  if (!(o.tail_fraction > 0.0 && o.tail_fraction < 1.0)) {
    throw CLI::ValidationError("--tail-fraction", "must lie in (0, 1)");
  }
  if (o.trunc_exponent && !(*o.trunc_exponent > 0.0 && *o.trunc_exponent <= 1.0)) {
    throw CLI::ValidationError("--trunc-exponent", "must lie in (0, 1]");
  }
  if (o.bootstrap == 1) throw CLI::ValidationError("--bootstrap", "needs at least 2 replicates");
}

// Estimates from a whole matrix held in memory.
ElpdResult estimate(const LogLikMatrix& m, const EstimatorOptions& o) {
  if (const auto method = loo_method(o)) return elpd_loo(m, *method, o.threads);
  return waic(m, o.threads);
}

// Estimates by reading the input in column blocks.
ElpdResult estimate_streaming(const io::InputSpec& spec, const EstimatorOptions& o) {
  const io::MatrixShape shape = io::scan_shape(spec);
  const auto method = loo_method(o);
  std::vector<LooPoint> loo_points;
  std::vector<WaicPoint> waic_points;
  for (std::size_t first = 0; first < shape.points; first += o.chunk_columns) {
    const std::size_t count = std::min(o.chunk_columns, shape.points - first);
    const LogLikMatrix block = io::read_columns(spec, first, count);
    for (std::size_t j = 0; j < count; ++j) {
      if (method) {
        loo_points.push_back(loo_point(block.column(j), *method));
      } else {
        waic_points.push_back(waic_point(block.column(j)));
      }
    }
  }
  if (method) return make_loo_result(*method, loo_points, shape.draws);
  return make_waic_result(waic_points, shape.draws);
}

ElpdResult estimate_input(const io::InputSpec& spec, const EstimatorOptions& o) {
  if (o.chunk_columns > 0) return estimate_streaming(spec, o);
  return estimate(io::read_input(spec), o);
}

void write_json(const std::string& path, const nlohmann::json& doc) {
  std::ofstream file(path);
  if (!file) fail(Errc::invalid_argument, "cannot write " + path);
  file << doc.dump(2) << '\n';
}

ReportOptions report_options(const ElpdResult& r, const EstimatorOptions& o) {
  ReportOptions options;
  options.pointwise = o.pointwise;
  if (o.bootstrap > 0) {
    options.bootstrap = BootstrapSummary{
        bayesian_bootstrap_se(r.pointwise.values, o.bootstrap, o.seed, o.threads), o.bootstrap, o.seed};
  }
  return options;
}

void emit(const ElpdResult& r, const EstimatorOptions& o, std::ostream& out, const std::string& command) {
  const ReportOptions options = report_options(r, o);
  out << render_report(r, options);
  if (!o.output.empty()) {
    nlohmann::json doc = to_json(r, options);
    doc["command"] = command;
    write_json(o.output, doc);
  }
}

std::vector<std::string> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse, "cannot open " + path);
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    labels.push_back(line);
  }
  return labels;
}

void add_input_options(CLI::App* cmd, InputOptions& input) {
  cmd->add_option("--format", input.format, "Input format: matrix_csv, draws_csv or ndjson")
      ->check(CLI::IsMember({"matrix_csv", "draws_csv", "ndjson"}))
      ->capture_default_str();
  cmd->add_option("--prefix", input.prefix, "Column prefix selecting log-likelihood columns")
      ->capture_default_str();
}

void add_estimator_options(CLI::App* cmd, EstimatorOptions& o, bool with_method) {
  if (with_method) {
    cmd->add_option("--method", o.method, "Estimator: is, tis, psis or waic")
        ->check(CLI::IsMember({"is", "tis", "psis", "waic"}))
        ->capture_default_str();
  }
  cmd->add_option("--tail-fraction", o.tail_fraction, "Fraction of largest ratios fitted by PSIS")
      ->capture_default_str();
  cmd->add_option("--trunc-exponent", o.trunc_exponent,
                  "Truncation exponent e for the S^e cap (default 0.5 for tis, 0.75 for psis)");
  cmd->add_option("--seed", o.seed, "Seed for the Bayesian bootstrap")->capture_default_str();
  cmd->add_option("--bootstrap", o.bootstrap, "Bayesian bootstrap replicates (0 disables)")
      ->capture_default_str();
  cmd->add_flag("--pointwise", o.pointwise, "Print the pointwise table");
  cmd->add_option("--output", o.output, "Write the JSON result document to this path");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
  cmd->add_option("--chunk-columns", o.chunk_columns,
                  "Read the input in blocks of this many columns (0 = load all at once)")
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Predictive accuracy (elpd) from posterior log-likelihood draws", "elpd"};
  app.require_subcommand(1);

  InputOptions input;
  EstimatorOptions est;

  std::string loo_path;
  auto* loo = app.add_subcommand("loo", "Leave-one-out estimate (PSIS by default)");
  loo->add_option("input", loo_path, "Log-likelihood input file")->required();
  add_input_options(loo, input);
  add_estimator_options(loo, est, true);

  std::string waic_path;
  auto* waic_cmd = app.add_subcommand("waic", "WAIC estimate");
  waic_cmd->add_option("input", waic_path, "Log-likelihood input file")->required();
  add_input_options(waic_cmd, input);
  add_estimator_options(waic_cmd, est, false);

  std::size_t split_points = 0;
  int split_folds = 10;
  std::string strata_path;
  auto* split = app.add_subcommand("kfold_split", "Write a fold assignment table");
  split->alias("kfold-split");
  split->add_option("--points,-n", split_points, "Number of data points")->required();
  split->add_option("--folds,-K", split_folds, "Number of folds")->capture_default_str();
  split->add_option("--seed", est.seed, "Permutation seed")->capture_default_str();
  split->add_option("--strata", strata_path, "File with one stratum label per point");
  split->add_option("--output", est.output, "Write the table here instead of stdout");

  std::string assignment_path;
  std::vector<std::string> fold_paths;
  std::string full_path;
  bool burman = false;
  auto* kfold_cmd = app.add_subcommand("kfold_elpd", "K-fold elpd from per-fold held-out draws");
  kfold_cmd->alias("kfold-elpd");
  kfold_cmd->add_option("--assignment", assignment_path, "Fold table (point_index,fold_id)")->required();
  kfold_cmd->add_option("folds", fold_paths,
                        "Per-fold log-likelihood files in fold order; each holds the fold's "
                        "held-out columns, or all n columns")
      ->required();
  kfold_cmd->add_option("--full", full_path, "Full-data log-likelihood matrix (enables p_kfold)");
  kfold_cmd->add_flag("--burman", burman,
                      "Apply the first-order bias correction (needs --full and n-column fold files)");
  add_input_options(kfold_cmd, input);
  kfold_cmd->add_option("--seed", est.seed, "Seed for the Bayesian bootstrap")->capture_default_str();
  kfold_cmd->add_option("--bootstrap", est.bootstrap, "Bayesian bootstrap replicates")->capture_default_str();
  kfold_cmd->add_flag("--pointwise", est.pointwise, "Print the pointwise table");
  kfold_cmd->add_option("--output", est.output, "Write the JSON result document to this path");

  std::vector<std::string> compare_paths;
  auto* compare_cmd = app.add_subcommand("compare", "Paired comparison of two models");
  compare_cmd->add_option("inputs", compare_paths, "First and second model inputs")->required()->expected(2);
  add_input_options(compare_cmd, input);
  add_estimator_options(compare_cmd, est, true);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    check_estimator_options(est);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (loo->parsed()) {
      const ElpdResult r = estimate_input(make_spec(loo_path, input), est);
      emit(r, est, out, "loo");
    } else if (waic_cmd->parsed()) {
      est.method = "waic";
      const ElpdResult r = estimate_input(make_spec(waic_path, input), est);
      emit(r, est, out, "waic");
    } else if (split->parsed()) {
      std::optional<std::vector<std::string>> strata;
      if (!strata_path.empty()) strata = read_labels(strata_path);
      const FoldAssignment folds = make_folds(split_points, split_folds, est.seed, std::move(strata));
      if (est.output.empty()) {
        write_fold_table(out, folds);
      } else {
        std::ofstream file(est.output);
        if (!file) fail(Errc::invalid_argument, "cannot write " + est.output);
        write_fold_table(file, folds);
      }
    } else if (kfold_cmd->parsed()) {
      std::ifstream table(assignment_path);
      if (!table) fail(Errc::parse, "cannot open " + assignment_path);
      const FoldAssignment assignment = read_fold_table(table);
      if (fold_paths.size() != static_cast<std::size_t>(assignment.folds)) {
        fail(Errc::coverage, "fold table has " + std::to_string(assignment.folds) + " folds but " +
                                 std::to_string(fold_paths.size()) + " fold files were given");
      }
      std::optional<LogLikMatrix> full;
      if (!full_path.empty()) full = io::read_input(make_spec(full_path, input));
      if (burman && !full) throw CLI::ValidationError("--burman", "requires --full");

      std::vector<FoldLogLik> folds;
      for (std::size_t k = 0; k < fold_paths.size(); ++k) {
        LogLikMatrix m = io::read_input(make_spec(fold_paths[k], input));
        const int fold_id = static_cast<int>(k) + 1;
        const auto members = assignment.members(fold_id);
        if (m.points() == assignment.points() && members.size() != assignment.points()) {
          // All n columns given: keep the held-out ones.
          std::vector<double> values;
          for (std::size_t i : members) {
            const auto col = m.column(i);
            values.insert(values.end(), col.begin(), col.end());
          }
          LogLikMatrix holdout = LogLikMatrix::from_columns(m.draws(), std::move(values));
          folds.push_back({fold_id, std::move(holdout), std::move(m)});
        } else {
          if (burman) {
            throw CLI::ValidationError("--burman", "fold file " + fold_paths[k] + " must hold all " +
                                                       std::to_string(assignment.points()) + " columns");
          }
          folds.push_back({fold_id, std::move(m), std::nullopt});
        }
      }
      const ElpdResult r = burman ? elpd_kfold_corrected(folds, assignment, *full)
                                  : elpd_kfold(folds, assignment, full ? &*full : nullptr);
      emit(r, est, out, "kfold_elpd");
    } else if (compare_cmd->parsed()) {
      const ElpdResult a = estimate_input(make_spec(compare_paths[0], input), est);
      const ElpdResult b = estimate_input(make_spec(compare_paths[1], input), est);
      const ComparisonResult c = compare(a, b);
      out << render_comparison(c, a.method);
      if (!est.output.empty()) {
        nlohmann::json doc = comparison_json(c, a.method, a, b);
        doc["command"] = "compare";
        write_json(est.output, doc);
      }
    }
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_input_error(e.code()) ? kInputError : kEstimatorError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kEstimatorError;
  }
  return kSuccess;
}

}  // namespace elpd::cli
