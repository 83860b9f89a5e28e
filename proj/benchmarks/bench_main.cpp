#include <benchmark/benchmark.h>

#include <algorithm>

#include "elpd/estimators.hpp"
#include "elpd/gpd.hpp"
#include "elpd/oracle.hpp"
#include "elpd/psis.hpp"
#include "elpd/random.hpp"

namespace {

void BM_FitGpd(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  elpd::Rng rng(1);
  const elpd::GeneralizedPareto dist{0.0, 1.0, 0.5};
  std::vector<double> x(m);
  for (double& v : x) v = elpd::gpd_quantile(dist, rng.uniform());
  std::sort(x.begin(), x.end());
  for (auto _ : state) benchmark::DoNotOptimize(elpd::fit_gpd(x, 0.0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}
BENCHMARK(BM_FitGpd)->Arg(200)->Arg(800)->Arg(2000);

void BM_PsisSmooth(benchmark::State& state) {
  const auto s = static_cast<std::size_t>(state.range(0));
  const auto ratios = elpd::oracle::gen_heavy_ratios({0.5, 1.0, 0.5, 1.0}, s, 3);
  for (auto _ : state) benchmark::DoNotOptimize(elpd::psis_smooth(ratios));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s));
}
BENCHMARK(BM_PsisSmooth)->Arg(1000)->Arg(4000)->Arg(16000);

void BM_ElpdLoo(benchmark::State& state) {
  const auto data = elpd::oracle::simulate(static_cast<std::size_t>(state.range(1)), 1.0, 0.0, 1.0,
                                           elpd::oracle::DataScheme::common_mean, 5);
  const auto m = elpd::oracle::sample_loglik(data.model, static_cast<std::size_t>(state.range(0)), 6);
  for (auto _ : state) benchmark::DoNotOptimize(elpd::elpd_loo(m, elpd::LooMethod::psis(), 1));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(BM_ElpdLoo)->Args({4000, 100})->Args({1000, 1000})->Unit(benchmark::kMillisecond);

void BM_Waic(benchmark::State& state) {
  const auto data = elpd::oracle::simulate(100, 1.0, 0.0, 1.0, elpd::oracle::DataScheme::common_mean, 5);
  const auto m = elpd::oracle::sample_loglik(data.model, 4000, 6);
  for (auto _ : state) benchmark::DoNotOptimize(elpd::waic(m, 1));
}
BENCHMARK(BM_Waic)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
