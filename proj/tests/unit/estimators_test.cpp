#include "elpd/estimators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "elpd/error.hpp"
#include "elpd/oracle.hpp"
#include "reference.hpp"

namespace elpd {
namespace {

const std::vector<LooMethod> kAllLoo = {LooMethod::is(), LooMethod::tis(), LooMethod::tis(0.25),
                                        LooMethod::psis()};

LogLikMatrix random_matrix(std::size_t draws, std::size_t points, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(-2.0, sd);
  std::vector<std::vector<double>> rows(draws, std::vector<double>(points));
  for (auto& r : rows) {
    for (double& v : r) v = normal(gen);
  }
  return validate_matrix(rows);
}

TEST(ElpdLoo, ConstantColumnAnyMethod) {
  std::vector<std::vector<double>> rows(500, std::vector<double>{-1.25, 3.0});
  const LogLikMatrix m = validate_matrix(rows);
  for (const LooMethod& method : kAllLoo) {
    const ElpdResult r = elpd_loo(m, method);
    EXPECT_EQ(r.pointwise.values[0], -1.25);
    EXPECT_EQ(r.pointwise.values[1], 3.0);
    EXPECT_EQ(r.p_eff_pointwise[0], 0.0);
    EXPECT_EQ(*r.p_eff, 0.0);
  }
}

TEST(ElpdLoo, HarmonicMeanForRawImportanceSampling) {
  const LogLikMatrix m = validate_matrix({{std::log(0.5)}, {std::log(0.25)}});
  const ElpdResult r = elpd_loo(m, LooMethod::is());
  EXPECT_NEAR(r.total, std::log(1.0 / 3.0), 1e-15);
  EXPECT_NEAR(r.total, -1.0986, 1e-4);
  EXPECT_EQ(r.method, Method::is_loo);
  EXPECT_TRUE(r.k_hats.empty());
}

TEST(ElpdLoo, ResultInvariants) {
  const LogLikMatrix m = random_matrix(1000, 40, 5, 0.7);
  for (const LooMethod& method : kAllLoo) {
    const ElpdResult r = elpd_loo(m, method);
    double sum = 0.0;
    for (double v : r.pointwise.values) sum += v;
    EXPECT_NEAR(r.total, sum, 1e-10 * std::abs(sum));
    EXPECT_EQ(r.ic_scale, -2.0 * r.total);
    const double lpd_total = lpd(m).total();
    EXPECT_NEAR(*r.p_eff, lpd_total - r.total, 1e-10);
    EXPECT_NEAR(r.se_total, static_cast<double>(testing::ref_se(r.pointwise.values)), 1e-10 * r.se_total);
    EXPECT_EQ(r.draws, 1000u);
  }
  const ElpdResult psis = elpd_loo(m, LooMethod::psis());
  EXPECT_EQ(psis.k_hats.size(), 40u);
}

TEST(ElpdLoo, SingleThreadAndPoolAgree) {
  const LogLikMatrix m = random_matrix(800, 37, 6, 2.0);
  const ElpdResult a = elpd_loo(m, LooMethod::psis(), 1);
  const ElpdResult b = elpd_loo(m, LooMethod::psis(), 4);
  EXPECT_EQ(a.pointwise.values, b.pointwise.values);
  EXPECT_EQ(a.k_hats, b.k_hats);
}

TEST(ElpdLoo, ShiftCovariance) {
  const LogLikMatrix m = random_matrix(2000, 3, 8, 1.5);
  std::vector<double> values(m.column_major().begin(), m.column_major().end());
  const double shift = 4.5;
  for (std::size_t s = 0; s < m.draws(); ++s) values[1 * m.draws() + s] += shift;
  const LogLikMatrix shifted = LogLikMatrix::from_columns(m.draws(), values);
  for (const LooMethod& method : kAllLoo) {
    const ElpdResult a = elpd_loo(m, method);
    const ElpdResult b = elpd_loo(shifted, method);
    EXPECT_NEAR(b.pointwise.values[1], a.pointwise.values[1] + shift, 1e-10);
    EXPECT_EQ(b.pointwise.values[0], a.pointwise.values[0]);
    if (method.kind == LooMethod::Kind::psis) {
      ASSERT_TRUE(a.k_hats[1] && b.k_hats[1]);
      EXPECT_NEAR(*b.k_hats[1], *a.k_hats[1], 1e-10);
    }
  }
  const ElpdResult wa = waic(m);
  const ElpdResult wb = waic(shifted);
  EXPECT_NEAR(wb.pointwise.values[1], wa.pointwise.values[1] + shift, 1e-10);
  EXPECT_NEAR(wb.waic_variance_terms[1], wa.waic_variance_terms[1], 1e-10);
}

TEST(ElpdLoo, EffectiveParametersNonnegativeOnOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto data = oracle::simulate(50, 1.0, 0.0, 1.0, oracle::DataScheme::common_mean, seed);
    const LogLikMatrix m = oracle::sample_loglik(data.model, 2000, seed + 100);
    for (const LooMethod& method : kAllLoo) EXPECT_GE(*elpd_loo(m, method).p_eff, 0.0);
  }
}

TEST(Waic, ConstantMatrix) {
  std::vector<std::vector<double>> rows(10, std::vector<double>{-0.5, -7.0, 2.0});
  const LogLikMatrix m = validate_matrix(rows);
  const ElpdResult r = waic(m);
  EXPECT_EQ(*r.p_eff, 0.0);
  EXPECT_EQ(r.total, lpd(m).total());
  EXPECT_EQ(r.pointwise.values, lpd(m).values);
  EXPECT_EQ(waic_terms_above_threshold(r), 0u);
}

TEST(Waic, VarianceTermFlag) {
  const LogLikMatrix m = validate_matrix({{0.0, -1.0}, {2.0, -1.2}});
  const ElpdResult r = waic(m);
  EXPECT_EQ(r.waic_variance_terms[0], 2.0);
  EXPECT_NEAR(r.waic_variance_terms[1], 0.02, 1e-15);
  EXPECT_EQ(waic_terms_above_threshold(r), 1u);
  EXPECT_NEAR(r.pointwise.values[0], std::log((1.0 + std::exp(2.0)) / 2.0) - 2.0, 1e-14);
  EXPECT_TRUE(r.k_hats.empty());
}

TEST(Waic, RegularModelHasOneEffectiveParameter) {
  // Single location parameter: p_waic -> 1 for a well-specified model.
  std::vector<double> p;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto data = oracle::simulate(200, 1.0, 0.0, 10.0, oracle::DataScheme::common_mean, seed);
    p.push_back(*waic(oracle::sample_loglik(data.model, 4000, 7 + seed)).p_eff);
  }
  const double med = testing::median(p);
  EXPECT_GT(med, 0.8);
  EXPECT_LT(med, 1.2);
}

TEST(Waic, AgreesWithLooAsDataGrow) {
  auto median_gap = [](std::size_t n) {
    std::vector<double> gaps;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto data = oracle::simulate(n, 1.0, 0.0, 1.0, oracle::DataScheme::common_mean, 500 + seed);
      const LogLikMatrix m = oracle::sample_loglik(data.model, 2000, 900 + seed);
      gaps.push_back(std::abs(waic(m).total - elpd_loo(m).total));
    }
    return testing::median(gaps);
  };
  EXPECT_LT(median_gap(1000), median_gap(100));
}

TEST(SeOf, Examples) {
  EXPECT_EQ(se_of(std::vector<double>{3.0, 3.0, 3.0}), 0.0);
  EXPECT_EQ(se_of(std::vector<double>{0.0, 2.0}), 2.0);
  try {
    se_of(std::vector<double>{1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::degenerate_sample_size);
  }
}

TEST(SeOf, MatchesExtendedPrecision) {
  std::mt19937_64 gen(77);
  std::normal_distribution<double> normal(-3.0, 2.0);
  std::vector<double> v(1000);
  for (double& x : v) x = normal(gen);
  const long double expected = testing::ref_se(v);
  EXPECT_LE(std::abs(se_of(v) - expected), 1e-10L * expected);
}

ElpdResult with_pointwise(std::vector<double> values) {
  ElpdResult r;
  r.pointwise.values = std::move(values);
  r.total = r.pointwise.total();
  r.se_total = se_of(r.pointwise.values);
  return r;
}

TEST(Compare, IdenticalModels) {
  const ElpdResult a = with_pointwise({-1.0, -2.0, -0.5});
  const ComparisonResult c = compare(a, a);
  EXPECT_EQ(c.elpd_diff, 0.0);
  EXPECT_EQ(c.se_diff, 0.0);
}

TEST(Compare, SignConventionAndAntisymmetry) {
  const ElpdResult a = with_pointwise({-1.0, -2.0, -0.5, -3.0});
  const ElpdResult b = with_pointwise({-0.5, -1.0, -0.75, -2.0});
  const ComparisonResult ab = compare(a, b);
  const ComparisonResult ba = compare(b, a);
  EXPECT_NEAR(ab.elpd_diff, 2.25, 1e-15);
  EXPECT_EQ(ab.elpd_diff, -ba.elpd_diff);
  EXPECT_EQ(ab.se_diff, ba.se_diff);
}

TEST(Compare, LengthMismatch) {
  try {
    compare(with_pointwise({1.0, 2.0}), with_pointwise({1.0, 2.0, 3.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::length_mismatch);
  }
}

TEST(Compare, PairingHelpsForCorrelatedModels) {
  // Model b is model a plus a small corruption: strongly correlated pointwise.
  std::mt19937_64 gen(101);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> va(300), vb(300);
  for (std::size_t i = 0; i < va.size(); ++i) {
    va[i] = -1.0 + normal(gen);
    vb[i] = va[i] - 0.1 + 0.2 * normal(gen);
  }
  const ElpdResult a = with_pointwise(va);
  const ElpdResult b = with_pointwise(vb);
  const ComparisonResult c = compare(a, b);
  EXPECT_LE(c.se_diff, a.se_total + b.se_total);
  EXPECT_LT(c.se_diff, std::sqrt(a.se_total * a.se_total + b.se_total * b.se_total));
  std::vector<double> diff(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) diff[i] = vb[i] - va[i];
  EXPECT_NEAR(c.se_diff, static_cast<double>(testing::ref_se(diff)), 1e-10 * c.se_diff);
}

TEST(BayesianBootstrap, ConstantIsZero) {
  const std::vector<double> v(40, -2.3);
  for (std::uint64_t seed : {1u, 2u, 99u}) EXPECT_EQ(bayesian_bootstrap_se(v, 100, seed), 0.0);
}

TEST(BayesianBootstrap, InvalidReplicates) {
  const std::vector<double> v{1.0, 2.0};
  for (std::size_t reps : {0u, 1u}) {
    try {
      bayesian_bootstrap_se(v, reps, 1);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::invalid_replicates);
    }
  }
}

TEST(BayesianBootstrap, MatchesClassicalStandardError) {
  std::mt19937_64 gen(55);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(1000);
  for (double& x : v) x = normal(gen);
  const double bb = bayesian_bootstrap_se(v, 4000, 3);
  EXPECT_NEAR(bb, se_of(v), 0.15 * se_of(v));
}

TEST(BayesianBootstrap, DeterministicAcrossThreadCounts) {
  const std::vector<double> v{-1.0, -3.0, -0.2, -8.0, -2.5};
  const double a = bayesian_bootstrap_se(v, 500, 17, 1);
  EXPECT_EQ(a, bayesian_bootstrap_se(v, 500, 17, 3));
  EXPECT_EQ(a, bayesian_bootstrap_se(v, 500, 17, 1));
  EXPECT_NE(a, bayesian_bootstrap_se(v, 500, 18, 1));
}

}  // namespace
}  // namespace elpd
