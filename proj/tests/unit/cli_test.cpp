#include "cli.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "elpd/estimators.hpp"
#include "elpd/io.hpp"
#include "elpd/kfold.hpp"
#include "elpd/oracle.hpp"
#include "json.hpp"
#include "reference.hpp"

namespace elpd::cli {
namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "elpd");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) { return (testing::temp_dir() / name).string(); }

std::string write_matrix(const std::string& name, const LogLikMatrix& m) {
  std::ofstream file(tmp(name));
  io::write_matrix_csv(file, m);
  return tmp(name);
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

LogLikMatrix constant_matrix(double c) {
  return validate_matrix(std::vector<std::vector<double>>(100, std::vector<double>(5, c)));
}

LogLikMatrix oracle_matrix(std::size_t n, std::size_t draws, std::uint64_t seed) {
  const auto data = oracle::simulate(n, 1.0, 0.0, 1.0, oracle::DataScheme::common_mean, seed);
  return oracle::sample_loglik(data.model, draws, seed + 1);
}

TEST(Cli, LooOnConstantMatrix) {
  const std::string path = write_matrix("const.csv", constant_matrix(-1.0));
  const Outcome o = invoke({"loo", path});
  ASSERT_EQ(o.code, kSuccess) << o.err;
  EXPECT_NE(o.out.find("Computed from 100 by 5 log-likelihood matrix"), std::string::npos);
  EXPECT_NE(o.out.find("elpd_loo     -5.0"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("p_loo         0.0"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("looic        10.0"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("All Pareto k estimates are good"), std::string::npos) << o.out;
}

TEST(Cli, CompareFileWithItself) {
  const std::string path = write_matrix("self.csv", oracle_matrix(20, 400, 3));
  const Outcome w = invoke({"waic", path});
  ASSERT_EQ(w.code, kSuccess) << w.err;
  EXPECT_NE(w.out.find("elpd_waic"), std::string::npos);
  const Outcome c = invoke({"compare", path, path, "--method", "waic", "--output", tmp("cmp.json")});
  ASSERT_EQ(c.code, kSuccess) << c.err;
  const auto doc = read_json(tmp("cmp.json"));
  EXPECT_EQ(doc["elpd_diff"].get<double>(), 0.0);
  EXPECT_EQ(doc["se_diff"].get<double>(), 0.0);
  EXPECT_NE(c.out.find("0.0"), std::string::npos);
}

TEST(Cli, OracleExportMatchesLibraryExactly) {
  const LogLikMatrix m = oracle_matrix(30, 1000, 5);
  const std::string path = write_matrix("oracle.csv", m);
  for (const std::string method : {"psis", "tis", "is", "waic"}) {
    const Outcome o = invoke({"loo", path, "--method", method, "--output", tmp("oracle.json")});
    ASSERT_EQ(o.code, kSuccess) << o.err;
    const auto doc = read_json(tmp("oracle.json"));
    const ElpdResult lib = method == "psis"  ? elpd_loo(m, LooMethod::psis())
                           : method == "tis" ? elpd_loo(m, LooMethod::tis())
                           : method == "is"  ? elpd_loo(m, LooMethod::is())
                                             : waic(m);
    EXPECT_EQ(doc["estimates"]["elpd"]["estimate"].get<double>(), lib.total) << method;
    EXPECT_EQ(doc["estimates"]["p_eff"]["estimate"].get<double>(), *lib.p_eff) << method;
    EXPECT_EQ(doc["pointwise"]["elpd"].get<std::vector<double>>(), lib.pointwise.values) << method;
  }
}

TEST(Cli, StreamingAndThreadsDoNotChangeOutput) {
  const std::string path = write_matrix("stream.csv", oracle_matrix(23, 500, 9));
  const Outcome base = invoke({"loo", path, "--pointwise", "--threads", "1"});
  ASSERT_EQ(base.code, kSuccess) << base.err;
  EXPECT_EQ(invoke({"loo", path, "--pointwise", "--threads", "3"}).out, base.out);
  EXPECT_EQ(invoke({"loo", path, "--pointwise", "--chunk-columns", "5"}).out, base.out);
  EXPECT_EQ(invoke({"waic", path, "--chunk-columns", "4"}).out, invoke({"waic", path}).out);
}

TEST(Cli, BootstrapIsDeterministic) {
  const std::string path = write_matrix("boot.csv", oracle_matrix(40, 300, 2));
  const Outcome a = invoke({"loo", path, "--bootstrap", "200", "--seed", "7"});
  ASSERT_EQ(a.code, kSuccess) << a.err;
  EXPECT_NE(a.out.find("Bayesian bootstrap SE of elpd_loo"), std::string::npos);
  EXPECT_EQ(invoke({"loo", path, "--bootstrap", "200", "--seed", "7"}).out, a.out);
}

TEST(Cli, DrawsCsvAndNdjsonInputs) {
  {
    std::ofstream file(tmp("draws.csv"));
    file << "# comment\nlp__,log_lik[2],log_lik[1]\n0,-2,-1\n0,-2,-1\n0,-2,-1\n";
  }
  const Outcome d = invoke({"loo", tmp("draws.csv"), "--format", "draws_csv", "--output", tmp("d.json")});
  ASSERT_EQ(d.code, kSuccess) << d.err;
  EXPECT_EQ(read_json(tmp("d.json"))["pointwise"]["elpd"].get<std::vector<double>>(),
            (std::vector<double>{-1.0, -2.0}));
  {
    std::ofstream file(tmp("draws.ndjson"));
    file << "{\"ll\": [-1, -3]}\n{\"ll\": [-1, -3]}\n";
  }
  const Outcome j = invoke({"waic", tmp("draws.ndjson"), "--format", "ndjson", "--prefix", "ll"});
  ASSERT_EQ(j.code, kSuccess) << j.err;
  EXPECT_NE(j.out.find("-4.0"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(invoke({}).code, kUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, kUsage);
  const std::string path = write_matrix("codes.csv", constant_matrix(-1.0));
  EXPECT_EQ(invoke({"loo", path, "--method", "magic"}).code, kUsage);
  EXPECT_EQ(invoke({"loo", path, "--tail-fraction", "1.5"}).code, kUsage);
  EXPECT_EQ(invoke({"loo", path, "--format", "xml"}).code, kUsage);
  EXPECT_EQ(invoke({"loo", tmp("does_not_exist.csv")}).code, kInputError);
  {
    std::ofstream(tmp("nan.csv")) << "1,2\n3,nan\n";
  }
  const Outcome nan = invoke({"loo", tmp("nan.csv")});
  EXPECT_EQ(nan.code, kInputError);
  EXPECT_NE(nan.err.find("nan.csv:2"), std::string::npos) << nan.err;
  EXPECT_EQ(invoke({"kfold_split", "-n", "5", "-K", "9"}).code, kEstimatorError);
  EXPECT_EQ(invoke({"--help"}).code, kSuccess);
}

TEST(Cli, KfoldSplitAndElpd) {
  const auto data = oracle::simulate(12, 1.0, 0.0, 1.0, oracle::DataScheme::common_mean, 4);
  const Outcome split = invoke({"kfold-split", "-n", "12", "-K", "3", "--seed", "5", "--output", tmp("folds.csv")});
  ASSERT_EQ(split.code, kSuccess) << split.err;
  std::ifstream table(tmp("folds.csv"));
  const FoldAssignment a = read_fold_table(table);
  EXPECT_EQ(a.fold_of, make_folds(12, 3, 5).fold_of);

  std::vector<std::size_t> all(12);
  for (std::size_t i = 0; i < 12; ++i) all[i] = i;
  std::vector<std::string> args{"kfold_elpd", "--assignment", tmp("folds.csv")};
  std::vector<FoldLogLik> folds;
  std::vector<std::string> full_args = args;
  for (int f = 1; f <= 3; ++f) {
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < 12; ++i) {
      if (a.fold_of[i] != f) train.push_back(i);
    }
    const LogLikMatrix wide = oracle::sample_loglik(data.model, train, all, 200, 30 + static_cast<unsigned>(f));
    const LogLikMatrix held = oracle::sample_loglik(data.model, train, a.members(f), 200, 30 + static_cast<unsigned>(f));
    args.push_back(write_matrix("held" + std::to_string(f) + ".csv", held));
    full_args.push_back(write_matrix("wide" + std::to_string(f) + ".csv", wide));
    folds.push_back({f, held, wide});
  }
  const ElpdResult lib = elpd_kfold(folds, a);
  args.insert(args.end(), {"--output", tmp("kfold.json")});
  const Outcome o = invoke(args);
  ASSERT_EQ(o.code, kSuccess) << o.err;
  EXPECT_NE(o.out.find("elpd_kfold"), std::string::npos);
  EXPECT_EQ(read_json(tmp("kfold.json"))["estimates"]["elpd"]["estimate"].get<double>(), lib.total);

  const LogLikMatrix full = oracle::sample_loglik(data.model, 200, 99);
  const std::string full_path = write_matrix("full.csv", full);
  full_args.insert(full_args.end(), {"--full", full_path, "--burman", "--output", tmp("burman.json")});
  const Outcome b = invoke(full_args);
  ASSERT_EQ(b.code, kSuccess) << b.err;
  const auto doc = read_json(tmp("burman.json"));
  EXPECT_TRUE(doc["bias_corrected"].get<bool>());
  EXPECT_NEAR(doc["estimates"]["elpd"]["estimate"].get<double>(), elpd_kfold_corrected(folds, a, full).total,
              1e-12);

  std::vector<std::string> short_args{"kfold_elpd", "--assignment", tmp("folds.csv"), args[3], args[4]};
  EXPECT_EQ(invoke(short_args).code, kInputError);
}

TEST(Cli, ReportAndJsonAgreeAtDisplayedPrecision) {
  const std::string path = write_matrix("agree.csv", oracle_matrix(50, 800, 12));
  const Outcome o = invoke({"loo", path, "--output", tmp("agree.json")});
  ASSERT_EQ(o.code, kSuccess) << o.err;
  const auto doc = read_json(tmp("agree.json"));
  for (const std::string key : {"elpd", "p_eff", "ic"}) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.1f", doc["estimates"][key]["estimate"].get<double>());
    EXPECT_NE(o.out.find(buffer), std::string::npos) << key << '\n' << o.out;
  }
}

}  // namespace
}  // namespace elpd::cli
