#include <benchmark/benchmark.h>

#include <vector>

#include "dperm/curvature.hpp"
#include "dperm/harness.hpp"
#include "dperm/linalg.hpp"
#include "dperm/models.hpp"
#include "dperm/optim.hpp"
#include "dperm/privacy.hpp"
#include "dperm/rng.hpp"

namespace {

const dperm::Dataset& bench_dataset() {
  static const dperm::Dataset ds = dperm::synthetic_logistic(20000, 50, 4.0, 99);
  return ds;
}

dperm::LossSpec bench_spec() {
  dperm::LossSpec spec;
  spec.lambda = 1e-4;
  spec.clip = 1.0;
  return spec;
}

void BM_full_gradient_clipped(benchmark::State& state) {
  const dperm::Dataset& ds = bench_dataset();
  const dperm::LossSpec spec = bench_spec();
  std::vector<double> w(static_cast<std::size_t>(ds.p), 0.01);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dperm::full_gradient(spec, ds, w, true));
  }
}
BENCHMARK(BM_full_gradient_clipped);

void BM_full_objective(benchmark::State& state) {
  const dperm::Dataset& ds = bench_dataset();
  const dperm::LossSpec spec = bench_spec();
  std::vector<double> w(static_cast<std::size_t>(ds.p), 0.01);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dperm::full_objective(spec, ds, w));
  }
}
BENCHMARK(BM_full_objective);

void BM_hessian(benchmark::State& state) {
  const dperm::Dataset& ds = bench_dataset();
  const dperm::LossSpec spec = bench_spec();
  std::vector<double> w(static_cast<std::size_t>(ds.p), 0.01);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dperm::hessian(spec, ds, w));
  }
}
BENCHMARK(BM_hessian);

void BM_jacobi_eigenvalues(benchmark::State& state) {
  const std::int32_t p = static_cast<std::int32_t>(state.range(0));
  dperm::Rng rng(7);
  std::vector<double> a(static_cast<std::size_t>(p) * p);
  for (std::int32_t i = 0; i < p; ++i) {
    for (std::int32_t j = 0; j <= i; ++j) {
      const double v = rng.gaussian();
      a[static_cast<std::size_t>(i) * p + j] = v;
      a[static_cast<std::size_t>(j) * p + i] = v;
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(dperm::jacobi_eigenvalues(p, a));
  }
}
BENCHMARK(BM_jacobi_eigenvalues)->Arg(32)->Arg(104);

void BM_rdp_to_epsilon(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(dperm::epsilon_for(1.3, 0.1, 800, 1e-9));
  }
}
BENCHMARK(BM_rdp_to_epsilon);

void BM_calibrate_noise(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(dperm::calibrate_noise({0.1, 1e-9}, 0.1, 200));
  }
}
BENCHMARK(BM_calibrate_noise);

void BM_dp_sgd_poisson(benchmark::State& state) {
  const dperm::Dataset& ds = bench_dataset();
  const dperm::LossSpec spec = bench_spec();
  dperm::SgdConfig cfg;
  cfg.steps = 10;
  cfg.schedule = {dperm::ScheduleKind::constant, 0.5, 1.0, 1.0, 1.0, 0};
  cfg.noise_multiplier = 1.0;
  cfg.sampling = dperm::SamplingMode::poisson;
  cfg.q = 0.01;
  for (auto _ : state) {
    cfg.seed = static_cast<std::uint64_t>(state.iterations());
    benchmark::DoNotOptimize(dperm::dp_sgd(ds, spec, cfg));
  }
}
BENCHMARK(BM_dp_sgd_poisson);

}  // namespace

BENCHMARK_MAIN();
