#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "hetnetcov/analytic.hpp"
#include "hetnetcov/config.hpp"
#include "hetnetcov/montecarlo.hpp"
#include "hetnetcov/propagation.hpp"
#include "hetnetcov/rng.hpp"

using namespace hetnetcov;

namespace {

NetworkConfig one_tier_cfg() {
  NetworkConfig cfg;
  TierParams t;
  t.density_per_m2 = 2e-6;
  t.tx_power_dbm = 47.0;
  t.intercept_nlos_db = 2.7;
  t.intercept_los_db = 30.8;
  t.exponent_nlos = 4.28;
  t.exponent_los = 2.42;
  t.shadow_sigma_nlos_db = 8.0;
  t.shadow_sigma_los_db = 4.0;
  cfg.tiers.push_back(t);
  cfg.blockage_kappa_per_m = 0.008;
  cfg.n_candidates = 3;
  cfg.mc.realizations = 4000;
  cfg.mc.seed = 77;
  return cfg;
}

NetworkConfig two_tier_cfg() {
  NetworkConfig cfg = one_tier_cfg();
  TierParams t2 = cfg.tiers[0];
  t2.density_per_m2 = 2e-5;
  t2.tx_power_dbm = 33.0;
  t2.intercept_nlos_db = 32.9;
  t2.intercept_los_db = 41.4;
  t2.exponent_nlos = 3.75;
  t2.exponent_los = 2.09;
  cfg.tiers.push_back(t2);
  return cfg;
}

}  // namespace

TEST_CASE("candidate scoring invariants") {
  const NetworkConfig cfg = one_tier_cfg();
  const double window = mc_window_radius(cfg, 0);
  Rng rng(3);
  for (int i = 0; i < 3000; ++i) {
    Rng sub(cfg.mc.seed, 0, i);
    const TierRealization r = simulate_tier_realization(cfg, 0, window, sub);
    REQUIRE(r.candidate_r.size() == 3);
    REQUIRE(r.candidate_power.size() == 3);
    CHECK(r.candidate_r[0] <= r.candidate_r[1]);
    CHECK(r.candidate_r[1] <= r.candidate_r[2]);
    CHECK(r.station_count >= 3);
    // Own-tier interference only: the max-power candidate also has the max
    // SIR, exactly, because both share the same total received sum.
    if (!r.power_tie) CHECK(r.winner_by_power == r.winner_by_sir);
    const auto best = r.candidate_power[r.winner_by_power];
    for (double p : r.candidate_power) CHECK(p <= best);
  }
}

TEST_CASE("window radius grows as density falls") {
  NetworkConfig cfg = one_tier_cfg();
  const double w1 = mc_window_radius(cfg, 0);
  CHECK(w1 > 0.0);
  CHECK(mc_window_radius_at_density(cfg, 0, cfg.tiers[0].density_per_m2) == w1);
  CHECK(mc_window_radius_at_density(cfg, 0, cfg.tiers[0].density_per_m2 / 4.0) > w1);
  // The window must hold the candidate set with margin.
  const double expected_count =
      cfg.tiers[0].density_per_m2 * std::numbers::pi * w1 * w1;
  CHECK(expected_count > 10.0 * cfg.n_candidates);
}

TEST_CASE("coverage estimates and their structure") {
  const NetworkConfig cfg = two_tier_cfg();
  const std::vector<double> gammas = {0.03, 0.1, 0.3, 1.0, 3.0, 10.0};
  const CoverageResult res = estimate_coverage(cfg, gammas);
  REQUIRE(res.tiers.size() == 2);
  REQUIRE(res.network_pc.size() == gammas.size());
  CHECK(res.realizations == cfg.mc.realizations);

  for (std::size_t g = 1; g < gammas.size(); ++g) {
    // Common random numbers make the gamma sweep exactly monotone, not just
    // statistically so.
    CHECK(res.network_pc[g] <= res.network_pc[g - 1]);
    for (const auto& tier : res.tiers) CHECK(tier.pc[g] <= tier.pc[g - 1]);
  }
  for (const auto& tier : res.tiers) {
    double f = 0.0;
    for (double a : tier.assoc_frequency) f += a;
    CHECK(f == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t g = 0; g < gammas.size(); ++g) {
      CHECK(tier.pc[g] >= tier.ci[g].lo - 1e-12);
      CHECK(tier.pc[g] <= tier.ci[g].hi + 1e-12);
      CHECK(tier.hits[g] == std::llround(tier.pc[g] * double(res.realizations)));
    }
  }
  // Network coverage dominates every single tier (union of SIR events).
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    CHECK(res.network_pc[g] >= res.tiers[0].pc[g] - 1e-12);
    CHECK(res.network_pc[g] >= res.tiers[1].pc[g] - 1e-12);
  }
}

TEST_CASE("per-tier draws do not depend on the other tiers") {
  // Substreams are keyed by (tier, realization), so removing tier 2 must
  // leave tier 1's estimate untouched.
  const std::vector<double> gammas = {0.1, 1.0};
  const NetworkConfig cfg2 = two_tier_cfg();
  NetworkConfig cfg1 = cfg2;
  cfg1.tiers.pop_back();
  const CoverageResult r2 = estimate_coverage(cfg2, gammas);
  const CoverageResult r1 = estimate_coverage(cfg1, gammas);
  REQUIRE(r1.tiers.size() == 1);
  for (std::size_t g = 0; g < gammas.size(); ++g) CHECK(r1.tiers[0].pc[g] == r2.tiers[0].pc[g]);
  CHECK(r1.tiers[0].tie_count == r2.tiers[0].tie_count);
}

TEST_CASE("far-field shot noise matches the analytic transform") {
  NetworkConfig cfg = one_tier_cfg();
  cfg.mc.farfield_all_nlos = true;
  AnalyticContext ctx;
  ctx.tier = derive_linear(cfg.tiers[0]);
  ctx.kappa_per_m = cfg.blockage_kappa_per_m;
  ctx.quad = cfg.quad;
  const double rn = 400.0;
  const double p_at_rn = ctx.tier.b_nlos * std::pow(rn, -ctx.tier.exponent_nlos);
  const std::vector<double> s = {0.3 / p_at_rn, 3.0 / p_at_rn};
  const LtEstimate est = mc_far_lt(cfg, 0, rn, s, 20000, 99);
  REQUIRE(est.mean.size() == 2);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double exact = lt_far_interference(ctx, {s[i], 0.0}, rn).real();
    CHECK(std::fabs(est.mean[i] - exact) < 3.5 * est.se[i] + 1e-4);
  }
}

TEST_CASE("rejection sampler agrees with the transform inversion") {
  // Two fully independent routes to the conditional interference law: the
  // Monte Carlo rejection estimate and the numerically inverted transform
  // product.
  NetworkConfig cfg = one_tier_cfg();
  cfg.n_candidates = 2;
  AnalyticContext ctx;
  ctx.tier = derive_linear(cfg.tiers[0]);
  ctx.kappa_per_m = cfg.blockage_kappa_per_m;
  ctx.quad = cfg.quad;
  const std::vector<double> r = {260.0, 420.0};
  const double t = ctx.tier.b_nlos * std::pow(230.0, -ctx.tier.exponent_nlos);
  const ConditionalInterferenceDist dist(ctx, 0, t, r);
  std::vector<double> xs;
  for (double f : {0.4, 1.0, 2.5}) xs.push_back(f * t);
  const ConditionalCdfEstimate est =
      mc_conditional_interference_cdf(cfg, 0, 0, t, r, xs, 1500, 4242);
  REQUIRE(est.cdf.size() == xs.size());
  CHECK(est.accepted >= 1500);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double analytic = dist.cdf(xs[i]);
    const double slack = 1.8 * est.ci[i].halfwidth() + 5e-3;
    CHECK(std::fabs(est.cdf[i] - analytic) < slack);
  }
}

TEST_CASE("density sweep couples points through thinning") {
  NetworkConfig cfg = two_tier_cfg();
  cfg.mc.realizations = 2500;
  cfg.sweep.density_tier = 2;
  cfg.sweep.density_values_per_m2 = {5e-6, 1e-5, 2e-5, 4e-5};
  cfg.sweep.density_gamma_db = 0.0;
  const DensitySweepResult sweep = mc_density_sweep(cfg);
  REQUIRE(sweep.points.size() == 4);
  CHECK(sweep.tier_index == 1);
  CHECK(sweep.realizations == 2500);
  for (const auto& p : sweep.points) {
    CHECK(p.pc >= p.ci.lo - 1e-12);
    CHECK(p.pc <= p.ci.hi + 1e-12);
    CHECK(p.pc > 0.0);
    CHECK(p.pc < 1.0);
  }
  // Densities are echoed back in the order given.
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(sweep.points[i].density_per_m2 == cfg.sweep.density_values_per_m2[i]);
}
