#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "elpd/loglik.hpp"

namespace elpd::oracle {

// y_i ~ N(theta, obs_sd^2) with theta ~ N(prior_mean, prior_sd^2). The
// posterior and every predictive density are normal, so exact LOO,
// full-posterior lpd and test-set elpd have closed forms.
struct ConjugateNormalModel {
  std::vector<double> y;
  double obs_sd = 1.0;
  double prior_mean = 0.0;
  double prior_sd = 1.0;

  // Throws Error(invalid_argument) unless obs_sd > 0, prior_sd > 0, n >= 1.
  void validate() const;
};

struct NormalDensity {
  double mean = 0.0;
  double variance = 1.0;
};

double log_normal_density(double x, const NormalDensity& d);

// Posterior of theta given only the listed observations.
NormalDensity posterior(const ConjugateNormalModel& model, std::span<const std::size_t> subset);
// Posterior given all observations.
NormalDensity posterior(const ConjugateNormalModel& model);

// Posterior predictive for a new observation.
NormalDensity predictive(const ConjugateNormalModel& model, const NormalDensity& posterior);

// log p(y_i | y_{-i}) for every point; the prior predictive when n = 1.
PointwiseValues exact_loo(const ConjugateNormalModel& model);

// log p(y_i | y) under the full posterior.
PointwiseValues exact_lpd(const ConjugateNormalModel& model);

// S exact posterior draws given all of y; entry (s, i) = log N(y_i; theta^s,
// obs_sd^2). Deterministic per seed.
LogLikMatrix sample_loglik(const ConjugateNormalModel& model, std::size_t draws, std::uint64_t seed);

// Draws from the posterior given only `training`, evaluated at `evaluate`.
LogLikMatrix sample_loglik(const ConjugateNormalModel& model, std::span<const std::size_t> training,
                           std::span<const std::size_t> evaluate, std::size_t draws,
                           std::uint64_t seed);

// Sum over test points of the log posterior predictive density. 0 for an
// empty test set.
double test_elpd(const ConjugateNormalModel& model, std::span<const double> test_y);

// E[log p(y_new | y)] for y_new ~ truth, per new point.
double expected_log_predictive(const ConjugateNormalModel& model, const NormalDensity& truth);

enum class DataScheme {
  // One theta ~ N(prior_mean, prior_sd^2) shared by every point; the model is
  // correctly specified.
  common_mean,
  // Each point has its own theta_i ~ N(prior_mean, prior_sd^2), as in a
  // hierarchical population; the common-theta model becomes increasingly
  // misspecified as prior_sd / obs_sd grows.
  group_means,
};

struct SimulatedData {
  ConjugateNormalModel model;
  // Distribution of a fresh observation from the data-generating process.
  NormalDensity truth;
};

SimulatedData simulate(std::size_t n, double obs_sd, double prior_mean, double prior_sd,
                       DataScheme scheme, std::uint64_t seed);

// Mixture of a light bulk 1 + Exp(mean bulk_scale) and a heavy tail
// 1 + GPD(0, sigma, k_true) taken with probability tail_mass.
struct HeavyRatioSpec {
  double k_true = 0.5;
  double sigma = 1.0;
  double tail_mass = 0.5;
  double bulk_scale = 1.0;
};

// Log importance ratios of length S >= 100 drawn from the mixture above.
std::vector<double> gen_heavy_ratios(const HeavyRatioSpec& spec, std::size_t draws, std::uint64_t seed);

// Mean of the mixture; requires k_true < 1.
double heavy_ratio_mean(const HeavyRatioSpec& spec);

}  // namespace elpd::oracle
