#include "elpd/oracle.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "elpd/error.hpp"
#include "elpd/gpd.hpp"
#include "elpd/random.hpp"

namespace elpd::oracle {

void ConjugateNormalModel::validate() const {
  if (!(obs_sd > 0.0) || !(prior_sd > 0.0)) {
    fail(Errc::invalid_argument, "obs_sd and prior_sd must be positive");
  }
  if (y.empty()) fail(Errc::invalid_argument, "model needs at least one observation");
}

double log_normal_density(double x, const NormalDensity& d) {
  const double z = x - d.mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * d.variance) - 0.5 * z * z / d.variance;
}

namespace {

NormalDensity posterior_from(const ConjugateNormalModel& model, double sum_y, std::size_t count) {
  const double prior_precision = 1.0 / (model.prior_sd * model.prior_sd);
  const double data_precision = static_cast<double>(count) / (model.obs_sd * model.obs_sd);
  const double precision = prior_precision + data_precision;
  const double mean =
      (model.prior_mean * prior_precision + sum_y / (model.obs_sd * model.obs_sd)) / precision;
  return {mean, 1.0 / precision};
}

LogLikMatrix loglik_from_posterior(const ConjugateNormalModel& model, const NormalDensity& post,
                                   std::span<const std::size_t> evaluate, std::size_t draws,
                                   std::uint64_t seed) {
  Rng rng(seed);
  const double sd = std::sqrt(post.variance);
  std::vector<double> theta(draws);
  for (double& t : theta) t = post.mean + sd * rng.normal();

  // log_normal_density with the normalizing constant hoisted.
  const double variance = model.obs_sd * model.obs_sd;
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * variance);
  std::vector<double> values(draws * evaluate.size());
  for (std::size_t c = 0; c < evaluate.size(); ++c) {
    const double yi = model.y[evaluate[c]];
    double* column = values.data() + c * draws;
    for (std::size_t s = 0; s < draws; ++s) {
      const double z = yi - theta[s];
      column[s] = log_norm - 0.5 * z * z / variance;
    }
  }
  return LogLikMatrix::from_columns(draws, std::move(values));
}

}  // namespace

NormalDensity posterior(const ConjugateNormalModel& model, std::span<const std::size_t> subset) {
  model.validate();
  double sum = 0.0;
  for (std::size_t i : subset) sum += model.y.at(i);
  return posterior_from(model, sum, subset.size());
}

NormalDensity posterior(const ConjugateNormalModel& model) {
  model.validate();
  return posterior_from(model, std::accumulate(model.y.begin(), model.y.end(), 0.0), model.y.size());
}

NormalDensity predictive(const ConjugateNormalModel& model, const NormalDensity& post) {
  return {post.mean, model.obs_sd * model.obs_sd + post.variance};
}

PointwiseValues exact_loo(const ConjugateNormalModel& model) {
  model.validate();
  const std::size_t n = model.y.size();
  PointwiseValues out{PointwiseKind::elpd_loo, std::vector<double>(n)};
  // Exclude y_i by summing the others directly; subtracting from the total
  // would lose precision when one point dominates.
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + model.y[i];
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + model.y[i];
  for (std::size_t i = 0; i < n; ++i) {
    const NormalDensity post = posterior_from(model, prefix[i] + suffix[i + 1], n - 1);
    out.values[i] = log_normal_density(model.y[i], predictive(model, post));
  }
  return out;
}

PointwiseValues exact_lpd(const ConjugateNormalModel& model) {
  const NormalDensity pred = predictive(model, posterior(model));
  PointwiseValues out{PointwiseKind::lpd, std::vector<double>(model.y.size())};
  for (std::size_t i = 0; i < model.y.size(); ++i) out.values[i] = log_normal_density(model.y[i], pred);
  return out;
}

LogLikMatrix sample_loglik(const ConjugateNormalModel& model, std::size_t draws, std::uint64_t seed) {
  std::vector<std::size_t> all(model.y.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return loglik_from_posterior(model, posterior(model), all, draws, seed);
}

LogLikMatrix sample_loglik(const ConjugateNormalModel& model, std::span<const std::size_t> training,
                           std::span<const std::size_t> evaluate, std::size_t draws,
                           std::uint64_t seed) {
  return loglik_from_posterior(model, posterior(model, training), evaluate, draws, seed);
}

double test_elpd(const ConjugateNormalModel& model, std::span<const double> test_y) {
  if (test_y.empty()) return 0.0;
  const NormalDensity pred = predictive(model, posterior(model));
  double total = 0.0;
  for (double y : test_y) total += log_normal_density(y, pred);
  return total;
}

double expected_log_predictive(const ConjugateNormalModel& model, const NormalDensity& truth) {
  const NormalDensity pred = predictive(model, posterior(model));
  const double offset = truth.mean - pred.mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * pred.variance) -
         0.5 * (truth.variance + offset * offset) / pred.variance;
}

SimulatedData simulate(std::size_t n, double obs_sd, double prior_mean, double prior_sd,
                       DataScheme scheme, std::uint64_t seed) {
  Rng rng(seed);
  SimulatedData out;
  out.model.obs_sd = obs_sd;
  out.model.prior_mean = prior_mean;
  out.model.prior_sd = prior_sd;
  out.model.y.resize(n);
  if (scheme == DataScheme::common_mean) {
    const double theta = prior_mean + prior_sd * rng.normal();
    for (double& y : out.model.y) y = theta + obs_sd * rng.normal();
    out.truth = {theta, obs_sd * obs_sd};
  } else {
    for (double& y : out.model.y) {
      const double theta = prior_mean + prior_sd * rng.normal();
      y = theta + obs_sd * rng.normal();
    }
    out.truth = {prior_mean, obs_sd * obs_sd + prior_sd * prior_sd};
  }
  out.model.validate();
  return out;
}

std::vector<double> gen_heavy_ratios(const HeavyRatioSpec& spec, std::size_t draws, std::uint64_t seed) {
  if (draws < 100) fail(Errc::invalid_argument, "gen_heavy_ratios needs S >= 100");
  if (!(spec.tail_mass >= 0.0 && spec.tail_mass <= 1.0) || !(spec.sigma > 0.0) ||
      !(spec.bulk_scale >= 0.0)) {
    fail(Errc::invalid_argument, "invalid heavy-ratio generator parameters");
  }
  Rng rng(seed);
  const GeneralizedPareto tail{0.0, spec.sigma, spec.k_true};
  std::vector<double> out(draws);
  for (double& r : out) {
    const bool in_tail = rng.uniform() < spec.tail_mass;
    const double excess = in_tail ? gpd_quantile(tail, rng.uniform())
                                  : spec.bulk_scale * rng.exponential();
    r = std::log1p(excess);
  }
  return out;
}

double heavy_ratio_mean(const HeavyRatioSpec& spec) {
  if (!(spec.k_true < 1.0)) fail(Errc::invalid_argument, "mixture mean needs k_true < 1");
  return 1.0 + (1.0 - spec.tail_mass) * spec.bulk_scale + spec.tail_mass * spec.sigma / (1.0 - spec.k_true);
}

}  // namespace elpd::oracle
