#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <vector>

#include "coag/diagnostics.hpp"
#include "coag/grid_oracle.hpp"
#include "coag/stationary_profile.hpp"

namespace {

const coag::StationaryProfile& profile() {
  static const auto p = coag::build_profile(coag::ModelParams(0.0));
  return p;
}

double bump(double x) { return 0.8 * std::exp(-0.5 * x * x); }

coag::FibreState fibre(double theta) {
  const coag::ModelParams p(0.0);
  const auto [lo, hi] = coag::required_window(bump, theta, p);
  return coag::init_fibre(bump, theta, lo, hi, p);
}

void BM_BuildProfile(benchmark::State& state) {
  coag::ShootingOptions opts;
  opts.dx = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto p = coag::build_profile(coag::ModelParams(0.0), 1.0, opts);
    benchmark::DoNotOptimize(p.weighted_mass());
  }
}
BENCHMARK(BM_BuildProfile)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_IdentityCheck(benchmark::State& state) {
  const auto table = profile().table();
  for (auto _ : state) benchmark::DoNotOptimize(coag::validate_integral_identity(table));
}
BENCHMARK(BM_IdentityCheck)->Unit(benchmark::kMillisecond);

void BM_FibreStep(benchmark::State& state) {
  auto base = fibre(0.5);
  for (auto _ : state) {
    auto s = base;
    coag::step(s, 1.0 / 256.0);
    benchmark::DoNotOptimize(s.phi.data());
  }
}
BENCHMARK(BM_FibreStep);

void BM_FibreEvolve(benchmark::State& state) {
  const double horizon = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto s = fibre(0.3);
    coag::evolve(s, horizon);
    benchmark::DoNotOptimize(s.weighted_mass());
  }
}
BENCHMARK(BM_FibreEvolve)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_GridStep(benchmark::State& state) {
  const double dx = 1.0 / static_cast<double>(state.range(0));
  auto g = coag::make_grid_state(bump, -40.0, 12.0, dx, coag::ModelParams(0.0));
  for (auto _ : state) {
    coag::step_grid(g, dx / 2.0);
    benchmark::DoNotOptimize(g.h.data());
  }
}
BENCHMARK(BM_GridStep)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_DistanceQuadrature(benchmark::State& state) {
  std::vector<coag::FibreState> fibres;
  for (double th : coag::midpoint_thetas(static_cast<int>(state.range(0)))) {
    fibres.push_back(fibre(th));
    coag::evolve(fibres.back(), 2.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(coag::theorem1_distance(fibres, profile()));
}
BENCHMARK(BM_DistanceQuadrature)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
