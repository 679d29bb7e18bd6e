// Microbenchmarks for the hot paths: transform evaluation, numerical
// inversion, and Monte Carlo realization scoring.  Run with
// --benchmark_min_time=... for tighter timings.

#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "hetnetcov/analytic.hpp"
#include "hetnetcov/config.hpp"
#include "hetnetcov/geometry.hpp"
#include "hetnetcov/laplace.hpp"
#include "hetnetcov/montecarlo.hpp"
#include "hetnetcov/propagation.hpp"
#include "hetnetcov/rng.hpp"
#include "hetnetcov/tier.hpp"

namespace {

using hetnetcov::AnalyticContext;
using hetnetcov::NetworkConfig;
using hetnetcov::TierParams;

TierParams macro_tier() {
  TierParams t;
  t.density_per_m2 = 2e-6;
  t.tx_power_dbm = 47.0;
  t.intercept_nlos_db = 2.7;
  t.intercept_los_db = 30.8;
  t.exponent_nlos = 4.28;
  t.exponent_los = 2.42;
  t.shadow_sigma_nlos_db = 8.0;
  t.shadow_sigma_los_db = 4.0;
  return t;
}

AnalyticContext macro_ctx() {
  AnalyticContext ctx;
  ctx.tier = hetnetcov::derive_linear(macro_tier());
  ctx.kappa_per_m = 0.008;
  return ctx;
}

NetworkConfig macro_cfg() {
  NetworkConfig cfg;
  cfg.tiers = {macro_tier()};
  cfg.blockage_kappa_per_m = 0.008;
  cfg.n_candidates = 2;
  cfg.sweep.gamma_db = {0.0};
  return cfg;
}

void bm_mixture_cdf(benchmark::State& state) {
  const AnalyticContext ctx = macro_ctx();
  const auto mix = hetnetcov::link_power_law(ctx.tier, 300.0, ctx.kappa_per_m);
  const double t = ctx.tier.b_nlos * std::pow(300.0, -ctx.tier.exponent_nlos);
  double x = 0.3 * t;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hetnetcov::power_cdf(mix, x));
    x = x < 3.0 * t ? x * 1.01 : 0.3 * t;
  }
}
BENCHMARK(bm_mixture_cdf);

void bm_far_lt(benchmark::State& state) {
  const AnalyticContext ctx = macro_ctx();
  const double t = ctx.tier.b_nlos * std::pow(350.0, -ctx.tier.exponent_nlos);
  const std::complex<double> s(1.0 / t, 3.0 / t);
  for (auto _ : state)
    benchmark::DoNotOptimize(hetnetcov::lt_far_interference(ctx, s, 350.0));
}
BENCHMARK(bm_far_lt);

void bm_truncated_lt(benchmark::State& state) {
  const AnalyticContext ctx = macro_ctx();
  const double t = ctx.tier.b_nlos * std::pow(250.0, -ctx.tier.exponent_nlos);
  const std::complex<double> s(11.51 / t, 40.0 / t);
  for (auto _ : state)
    benchmark::DoNotOptimize(hetnetcov::lt_truncated_power_unnormalized(ctx, s, t, 400.0));
}
BENCHMARK(bm_truncated_lt);

void bm_conditional_coverage(benchmark::State& state) {
  const AnalyticContext ctx = macro_ctx();
  const std::vector<double> r = {260.0, 410.0};
  const double t = ctx.tier.b_nlos * std::pow(r[0], -ctx.tier.exponent_nlos);
  for (auto _ : state)
    benchmark::DoNotOptimize(hetnetcov::conditional_coverage(ctx, 0, t, r, 1.0));
}
BENCHMARK(bm_conditional_coverage);

void bm_decondition_power(benchmark::State& state) {
  const AnalyticContext ctx = macro_ctx();
  const std::vector<double> r = {260.0, 410.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(hetnetcov::decondition_power(ctx, 0, r, 1.0));
}
BENCHMARK(bm_decondition_power);

void bm_inversion_self_test(benchmark::State& state) {
  const auto tbl = hetnetcov::euler_table(15);
  for (auto _ : state)
    benchmark::DoNotOptimize(hetnetcov::inversion_self_test(tbl));
}
BENCHMARK(bm_inversion_self_test);

void bm_tier_realization(benchmark::State& state) {
  const NetworkConfig cfg = macro_cfg();
  const double window = hetnetcov::mc_window_radius(cfg, 0);
  std::uint64_t i = 0;
  for (auto _ : state) {
    hetnetcov::Rng rng(1, 0, i++);
    benchmark::DoNotOptimize(hetnetcov::simulate_tier_realization(cfg, 0, window, rng));
  }
}
BENCHMARK(bm_tier_realization);

void bm_ordered_distances(benchmark::State& state) {
  hetnetcov::Rng rng(9);
  for (auto _ : state)
    benchmark::DoNotOptimize(hetnetcov::sample_ordered_distances(5, 2e-6, rng));
}
BENCHMARK(bm_ordered_distances);

}  // namespace

BENCHMARK_MAIN();
