#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "jobfit/jobfit.hpp"

using namespace jobfit;

namespace {

const std::string kFixtureDir = JOBFIT_BENCH_FIXTURE_DIR;

Worker linear_uniform(double a1, double a2, double sigma) {
  return Worker(AbilityProfile::linear(a1, NoiseModel::uniform_scaled(sigma)),
                AbilityProfile::linear(a2, NoiseModel::uniform_scaled(sigma)));
}

void BM_QuantileTruncNormal(benchmark::State& state) {
  const auto prof = AbilityProfile::linear(0.22, NoiseModel::trunc_normal_variance(0.0065));
  double q = 0.0;
  for (auto _ : state) {
    q += 0.6180339887;
    if (q >= 1.0) q -= 1.0;
    benchmark::DoNotOptimize(quantile(prof, 0.45, q));
  }
}
BENCHMARK(BM_QuantileTruncNormal);

void BM_QuantileUniformScaled(benchmark::State& state) {
  const auto prof = AbilityProfile::linear(0.5, NoiseModel::uniform_scaled(0.3));
  double q = 0.0;
  for (auto _ : state) {
    q += 0.6180339887;
    if (q >= 1.0) q -= 1.0;
    benchmark::DoNotOptimize(quantile(prof, 0.45, q));
  }
}
BENCHMARK(BM_QuantileUniformScaled);

void BM_JobError(benchmark::State& state) {
  const JobSpec spec = random_balanced_job(state.range(0), state.range(0), 5, 0.25, 305);
  const JobErrorFunction err(spec, ErrorModel::all_average());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ErrorMatrix z(spec.n());
  for (auto& x : z.values()) x = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(err(z.values()));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_JobError)->Arg(20)->Arg(200);

void BM_SimulateFixture(benchmark::State& state) {
  const JobSpec spec = load_job_spec(kFixtureDir + "/computer_programmers.json");
  const Worker human = load_workers(kFixtureDir + "/workers.json").at("human");
  SimConfig cfg;
  cfg.trials = 10000;
  cfg.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_success_probability(human, spec, ErrorModel::weighted_sum(), cfg).value);
  }
  state.SetItemsProcessed(state.iterations() * cfg.trials);
}
BENCHMARK(BM_SimulateFixture)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_SimulateBalanced(benchmark::State& state) {
  const JobSpec spec = random_balanced_job(20, 20, 5, 0.25, 305);
  const Worker w = linear_uniform(0.5, 0.4, 0.1);
  SimConfig cfg;
  cfg.trials = 10000;
  cfg.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_success_probability(w, spec, ErrorModel::all_average(), cfg).value);
  }
  state.SetItemsProcessed(state.iterations() * cfg.trials);
}
BENCHMARK(BM_SimulateBalanced)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
