#include "hetnetcov/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>

#include "hetnetcov/errors.hpp"
#include "hetnetcov/parallel.hpp"
#include "hetnetcov/propagation.hpp"

namespace hetnetcov {

namespace {

constexpr std::uint64_t kCoverageStream = 0x4d434f5600000000ull;  // + tier index
constexpr std::uint64_t kSweepStream = 0x4d43535700000000ull;     // + swept tier index
constexpr std::uint64_t kFarStream = 0x4d43464cull;
constexpr std::uint64_t kCondStream = 0x4d43434full;
constexpr std::uint64_t kRedrawStride = 0x100000000ull;  // substream bump per redraw

constexpr double kInf = std::numeric_limits<double>::infinity();

// One station of a simulated deployment.  p_model is the received power
// under the per-station LOS/NLOS flip; p_nlos_forced is the power with the
// NLOS branch imposed, reusing the same shadowing quantile (needed when the
// far field is forced NLOS, so toggling the flag perturbs nothing else).
struct Station {
  double r = 0.0;
  double p_model = 0.0;
  double p_nlos_forced = 0.0;
};

// Draws the deployment with radii already ascending: sorted uniforms via
// exponential spacings, so no post-hoc sort is needed and the draw count
// stays O(count).
void draw_stations(const LinearTierParams& lin, double kappa, double window_radius,
                   std::uint64_t count, Rng& rng, std::vector<Station>& out) {
  out.clear();
  out.reserve(count);
  if (count == 0) return;
  std::vector<double> cum(count);
  double acc = 0.0;
  for (std::uint64_t i = 0; i < count; ++i) {
    acc += rng.exponential();
    cum[i] = acc;
  }
  acc += rng.exponential();
  const double r2 = window_radius * window_radius;
  for (std::uint64_t i = 0; i < count; ++i) {
    Station st;
    st.r = std::sqrt(r2 * cum[i] / acc);
    const PowerMixture mix = link_power_law(lin, st.r, kappa);
    const bool nlos = rng.bernoulli(mix.p_nlos);
    const double z = rng.normal();
    const double p_n = std::exp(mix.mu_nlos + mix.sigma_nlos * z);
    st.p_nlos_forced = p_n;
    st.p_model = nlos ? p_n : std::exp(mix.mu_los + mix.sigma_los * z);
    out.push_back(st);
  }
}

// Scores the candidate set (first n stations) against the rest of the
// deployment.  With farfield_all_nlos, stations past the candidates
// contribute their forced-NLOS power.
TierRealization score_stations(std::span<const Station> stations, std::size_t n,
                               bool farfield_all_nlos) {
  if (stations.size() < n)
    throw InsufficientPointsError("window holds " + std::to_string(stations.size()) +
                                  " stations, need " + std::to_string(n));
  TierRealization out;
  out.station_count = stations.size();
  out.candidate_r.reserve(n);
  out.candidate_power.reserve(n);
  double total = 0.0;
  for (std::size_t i = 0; i < stations.size(); ++i) {
    const double p = i < n ? stations[i].p_model
                           : (farfield_all_nlos ? stations[i].p_nlos_forced : stations[i].p_model);
    total += p;
    if (i < n) {
      out.candidate_r.push_back(stations[i].r);
      out.candidate_power.push_back(p);
    }
  }
  double best_power = -1.0, best_sir = -1.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double p = out.candidate_power[m];
    const double other = total - p;
    const double sir = other > 0.0 ? p / other : kInf;
    if (p > best_power) {
      best_power = p;
      out.winner_by_power = m;
    } else if (p == best_power) {
      out.power_tie = true;
    }
    if (sir > best_sir) {
      best_sir = sir;
      out.winner_by_sir = m;
    }
  }
  out.winner_sir = best_sir;
  return out;
}

double window_radius_impl(const NetworkConfig& cfg, std::size_t tier_index, double density) {
  if (cfg.mc.window_radius_m > 0.0) return cfg.mc.window_radius_m;
  const LinearTierParams lin = derive_linear(cfg.tiers.at(tier_index));
  const double alpha = lin.exponent_nlos;
  if (!(alpha > 2.0))
    throw ValidationError("auto window sizing requires exponent_nlos > 2; set window_radius_m");
  const double n = static_cast<double>(cfg.n_candidates);
  const double r_ref = std::sqrt(n / (std::numbers::pi * density));
  // Neglected tail fraction (R / r_ref)^(2 - alpha) held below 1e-4.
  const double r_tail = r_ref * std::pow(1e4, 1.0 / (alpha - 2.0));
  // Expected count high enough that < n stations is a non-event.
  const double target = n + 6.0 * std::sqrt(n) + 40.0;
  const double r_count = std::sqrt(target / (std::numbers::pi * density));
  return std::max({r_tail, r_count, 2.0 * r_ref});
}

}  // namespace

double mc_window_radius(const NetworkConfig& cfg, std::size_t tier_index) {
  return window_radius_impl(cfg, tier_index, derive_linear(cfg.tiers.at(tier_index)).density);
}

double mc_window_radius_at_density(const NetworkConfig& cfg, std::size_t tier_index,
                                   double density_per_m2) {
  if (!(density_per_m2 > 0.0)) throw ValidationError("window sizing: density must be > 0");
  return window_radius_impl(cfg, tier_index, density_per_m2);
}

TierRealization simulate_tier_realization(const NetworkConfig& cfg, std::size_t tier_index,
                                          double window_radius_m, Rng& rng) {
  const LinearTierParams lin = derive_linear(cfg.tiers.at(tier_index));
  const double kappa = cfg.effective_kappa(tier_index);
  const double mean = lin.density * std::numbers::pi * window_radius_m * window_radius_m;
  const std::uint64_t count = rng.poisson(mean);
  std::vector<Station> stations;
  draw_stations(lin, kappa, window_radius_m, count, rng, stations);
  return score_stations(stations, static_cast<std::size_t>(cfg.n_candidates),
                        cfg.mc.farfield_all_nlos);
}

CoverageResult estimate_coverage(const NetworkConfig& cfg, std::span<const double> gamma_linear,
                                 std::vector<std::string>* warnings) {
  for (double g : gamma_linear)
    if (!(g > 0.0) || !std::isfinite(g)) throw ValidationError("estimate_coverage: gamma must be positive");
  const std::size_t k_tiers = cfg.tiers.size();
  const std::size_t n = static_cast<std::size_t>(cfg.n_candidates);
  const std::uint64_t s_total = cfg.mc.realizations;
  if (s_total == 0) throw ValidationError("estimate_coverage: realizations must be >= 1");
  if (s_total < 1000 && warnings)
    warnings->push_back("only " + std::to_string(s_total) +
                        " realizations; coverage estimates will be noisy");

  std::vector<double> windows(k_tiers);
  for (std::size_t t = 0; t < k_tiers; ++t) windows[t] = mc_window_radius(cfg, t);

  // Per-realization records, filled independently of thread scheduling.
  std::vector<double> sir(k_tiers * s_total);
  std::vector<std::uint32_t> winner(k_tiers * s_total);
  std::vector<std::uint8_t> tie(k_tiers * s_total);
  std::vector<std::uint8_t> redraw(k_tiers * s_total, 0);
  std::vector<std::uint32_t> counts(k_tiers * s_total);

  std::mutex err_mutex;
  std::exception_ptr first_error;
  parallel_for_index(s_total, cfg.mc.threads, [&](std::uint64_t idx) {
    try {
      for (std::size_t t = 0; t < k_tiers; ++t) {
        TierRealization real;
        std::uint64_t attempt = 0;
        for (;;) {
          Rng rng(cfg.mc.seed, kCoverageStream + t, idx + attempt * kRedrawStride);
          try {
            real = simulate_tier_realization(cfg, t, windows[t], rng);
            break;
          } catch (const InsufficientPointsError&) {
            if (++attempt > 64) throw;
          }
        }
        const std::size_t slot = t * s_total + idx;
        sir[slot] = real.winner_sir;
        winner[slot] = static_cast<std::uint32_t>(real.winner_by_power);
        tie[slot] = real.power_tie ? 1 : 0;
        redraw[slot] = static_cast<std::uint8_t>(std::min<std::uint64_t>(attempt, 255));
        counts[slot] = static_cast<std::uint32_t>(std::min<std::size_t>(real.station_count, ~0u));
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  });
  if (first_error) std::rethrow_exception(first_error);

  CoverageResult res;
  res.gamma_linear.assign(gamma_linear.begin(), gamma_linear.end());
  res.realizations = s_total;
  res.network_pc.assign(gamma_linear.size(), 0.0);
  res.network_ci.assign(gamma_linear.size(), WilsonInterval{});
  res.tiers.resize(k_tiers);

  for (std::size_t t = 0; t < k_tiers; ++t) {
    McTierCoverage& tc = res.tiers[t];
    tc.tier_index = t;
    tc.window_radius_m = windows[t];
    tc.pc.assign(gamma_linear.size(), 0.0);
    tc.ci.assign(gamma_linear.size(), WilsonInterval{});
    tc.hits.assign(gamma_linear.size(), 0);
    tc.assoc_frequency.assign(n, 0.0);
    double count_sum = 0.0;
    for (std::uint64_t i = 0; i < s_total; ++i) {
      const std::size_t slot = t * s_total + i;
      tc.assoc_frequency[winner[slot]] += 1.0;
      tc.tie_count += tie[slot];
      tc.redraws += redraw[slot];
      count_sum += counts[slot];
    }
    for (double& f : tc.assoc_frequency) f /= static_cast<double>(s_total);
    tc.mean_station_count = count_sum / static_cast<double>(s_total);
    for (std::size_t g = 0; g < gamma_linear.size(); ++g) {
      std::uint64_t hits = 0;
      for (std::uint64_t i = 0; i < s_total; ++i)
        if (sir[t * s_total + i] > gamma_linear[g]) ++hits;
      tc.hits[g] = hits;
      tc.pc[g] = static_cast<double>(hits) / static_cast<double>(s_total);
      tc.ci[g] = wilson_interval(hits, s_total);
    }
  }
  for (std::size_t g = 0; g < gamma_linear.size(); ++g) {
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < s_total; ++i) {
      bool covered = false;
      for (std::size_t t = 0; t < k_tiers && !covered; ++t)
        covered = sir[t * s_total + i] > gamma_linear[g];
      if (covered) ++hits;
    }
    res.network_pc[g] = static_cast<double>(hits) / static_cast<double>(s_total);
    res.network_ci[g] = wilson_interval(hits, s_total);
  }
  return res;
}

DensitySweepResult mc_density_sweep(const NetworkConfig& cfg, std::vector<std::string>* warnings) {
  if (cfg.sweep.density_tier == 0 || cfg.sweep.density_values_per_m2.empty())
    throw ValidationError("density sweep requested without density_tier/density_values");
  const std::size_t st = static_cast<std::size_t>(cfg.sweep.density_tier - 1);
  if (st >= cfg.tiers.size()) throw ValidationError("density sweep: tier index out of range");
  const std::vector<double>& lambdas = cfg.sweep.density_values_per_m2;
  for (double l : lambdas)
    if (!(l > 0.0)) throw ValidationError("density sweep: densities must be > 0");
  const double lambda_max = *std::max_element(lambdas.begin(), lambdas.end());
  const double lambda_min = *std::min_element(lambdas.begin(), lambdas.end());
  const double gamma = std::pow(10.0, cfg.sweep.density_gamma_db / 10.0);

  const std::size_t k_tiers = cfg.tiers.size();
  const std::size_t n = static_cast<std::size_t>(cfg.n_candidates);
  const std::uint64_t s_total = cfg.mc.realizations;
  if (s_total < 1000 && warnings)
    warnings->push_back("only " + std::to_string(s_total) + " realizations in the density sweep");

  // One window reused across sweep values: sized at the smallest density
  // (widest requirement) but populated at the largest.
  const double window = mc_window_radius_at_density(cfg, st, lambda_min);
  std::vector<double> other_windows(k_tiers, 0.0);
  for (std::size_t t = 0; t < k_tiers; ++t)
    if (t != st) other_windows[t] = mc_window_radius(cfg, t);

  const LinearTierParams swept_lin_template = derive_linear(cfg.tiers[st]);
  const double kappa_swept = cfg.effective_kappa(st);
  const bool all_nlos = cfg.mc.farfield_all_nlos;

  // hit[v*s_total + i]
  std::vector<std::uint8_t> hit(lambdas.size() * s_total, 0);
  std::mutex err_mutex;
  std::exception_ptr first_error;

  parallel_for_index(s_total, cfg.mc.threads, [&](std::uint64_t idx) {
    try {
      double best_other = -kInf;
      for (std::size_t t = 0; t < k_tiers; ++t) {
        if (t == st) continue;
        std::uint64_t attempt = 0;
        for (;;) {
          Rng rng(cfg.mc.seed, kCoverageStream + t, idx + attempt * kRedrawStride);
          try {
            best_other = std::max(best_other,
                                  simulate_tier_realization(cfg, t, other_windows[t], rng).winner_sir);
            break;
          } catch (const InsufficientPointsError&) {
            if (++attempt > 64) throw;
          }
        }
      }

      // Swept tier drawn once at lambda_max; sweep values keep nested
      // subsets via one uniform mark per station.
      Rng rng(cfg.mc.seed, kSweepStream + st, idx);
      LinearTierParams lin = swept_lin_template;
      lin.density = lambda_max;
      const double mean = lambda_max * std::numbers::pi * window * window;
      const std::uint64_t count = rng.poisson(mean);
      thread_local std::vector<Station> stations;
      draw_stations(lin, kappa_swept, window, count, rng, stations);
      thread_local std::vector<double> keep_mark;
      keep_mark.resize(stations.size());
      for (double& u : keep_mark) u = rng.uniform();

      thread_local std::vector<const Station*> kept;
      for (std::size_t v = 0; v < lambdas.size(); ++v) {
        const double frac = lambdas[v] / lambda_max;
        kept.clear();
        for (std::size_t i = 0; i < stations.size(); ++i)
          if (keep_mark[i] < frac) kept.push_back(&stations[i]);
        double best = best_other;
        if (kept.size() >= n) {
          double total = 0.0;
          for (std::size_t i = 0; i < kept.size(); ++i)
            total += i < n ? kept[i]->p_model
                           : (all_nlos ? kept[i]->p_nlos_forced : kept[i]->p_model);
          for (std::size_t m = 0; m < n; ++m) {
            const double p = kept[m]->p_model;
            const double other = total - p;
            best = std::max(best, other > 0.0 ? p / other : kInf);
          }
        }
        hit[v * s_total + idx] = best > gamma ? 1 : 0;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  });
  if (first_error) std::rethrow_exception(first_error);

  DensitySweepResult res;
  res.tier_index = st;
  res.gamma_linear = gamma;
  res.realizations = s_total;
  for (std::size_t v = 0; v < lambdas.size(); ++v) {
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < s_total; ++i) hits += hit[v * s_total + i];
    DensitySweepPoint pt;
    pt.density_per_m2 = lambdas[v];
    pt.pc = static_cast<double>(hits) / static_cast<double>(s_total);
    pt.ci = wilson_interval(hits, s_total);
    res.points.push_back(pt);
  }
  return res;
}

LtEstimate mc_far_lt(const NetworkConfig& cfg, std::size_t tier_index, double r_n,
                     std::span<const double> s_values, std::uint64_t realizations,
                     std::uint64_t seed) {
  if (!(r_n > 0.0)) throw ValidationError("mc_far_lt: r_n must be > 0");
  const LinearTierParams lin = derive_linear(cfg.tiers.at(tier_index));
  if (!(lin.exponent_nlos > 2.0)) throw ValidationError("mc_far_lt requires exponent_nlos > 2");
  const double r_out = r_n * std::pow(1e4, 1.0 / (lin.exponent_nlos - 2.0));
  const double mean = lin.density * std::numbers::pi * (r_out * r_out - r_n * r_n);
  if (mean > 5e7) throw ValidationError("mc_far_lt: window population too large to simulate");

  std::vector<RunningStat> stats(s_values.size());
  for (std::uint64_t i = 0; i < realizations; ++i) {
    Rng rng(seed, kFarStream, i);
    const std::uint64_t count = rng.poisson(mean);
    double interference = 0.0;
    for (std::uint64_t b = 0; b < count; ++b) {
      const double u = rng.uniform();
      const double r = std::sqrt(r_n * r_n + u * (r_out * r_out - r_n * r_n));
      // Far field is all-NLOS by model.
      const double mu = std::log(lin.b_nlos) - lin.exponent_nlos * std::log(r);
      interference += std::exp(mu + lin.sigma_s_nlos * rng.normal());
    }
    for (std::size_t j = 0; j < s_values.size(); ++j)
      stats[j].add(std::exp(-s_values[j] * interference));
  }
  LtEstimate out;
  out.s.assign(s_values.begin(), s_values.end());
  for (const RunningStat& st : stats) {
    out.mean.push_back(st.mean());
    out.se.push_back(st.stderror());
  }
  return out;
}

ConditionalCdfEstimate mc_conditional_interference_cdf(const NetworkConfig& cfg,
                                                       std::size_t tier_index, std::size_t m,
                                                       double t, std::span<const double> distances,
                                                       std::span<const double> x_values,
                                                       std::uint64_t target_accepted,
                                                       std::uint64_t seed) {
  if (m >= distances.size()) throw ValidationError("conditional cdf: m out of range");
  if (!(t > 0.0)) throw ValidationError("conditional cdf: t must be > 0");
  const LinearTierParams lin = derive_linear(cfg.tiers.at(tier_index));
  const double kappa = cfg.effective_kappa(tier_index);
  const double r_far = distances.back();
  const double r_out = r_far * std::pow(1e4, 1.0 / (lin.exponent_nlos - 2.0));
  const double far_mean = lin.density * std::numbers::pi * (r_out * r_out - r_far * r_far);

  std::vector<PowerMixture> peer_mix;
  for (std::size_t j = 0; j < distances.size(); ++j)
    peer_mix.push_back(link_power_law(lin, distances[j], kappa));

  Rng rng(seed, kCondStream, 0);
  std::vector<std::uint64_t> below(x_values.size(), 0);
  std::uint64_t accepted = 0, attempts = 0;
  const std::uint64_t budget = std::max<std::uint64_t>(200000, 64 * target_accepted);
  while (accepted < target_accepted && attempts < budget) {
    ++attempts;
    double near = 0.0;
    bool ok = true;
    for (std::size_t j = 0; j < distances.size(); ++j) {
      if (j == m) continue;
      const double p = draw_received_power(peer_mix[j], rng).power;
      if (p > t) {
        ok = false;
        break;
      }
      near += p;
    }
    if (!ok) continue;
    const std::uint64_t count = rng.poisson(far_mean);
    double interference = near;
    for (std::uint64_t b = 0; b < count; ++b) {
      const double u = rng.uniform();
      const double r = std::sqrt(r_far * r_far + u * (r_out * r_out - r_far * r_far));
      const double mu = std::log(lin.b_nlos) - lin.exponent_nlos * std::log(r);
      interference += std::exp(mu + lin.sigma_s_nlos * rng.normal());
    }
    ++accepted;
    for (std::size_t j = 0; j < x_values.size(); ++j)
      if (interference <= x_values[j]) ++below[j];
  }
  if (accepted < 500)
    throw InsufficientConditionalSamplesError(
        "only " + std::to_string(accepted) + " acceptances in " + std::to_string(attempts) +
        " attempts; the conditioning event is too rare at t = " + std::to_string(t));

  ConditionalCdfEstimate out;
  out.accepted = accepted;
  out.attempts = attempts;
  out.x.assign(x_values.begin(), x_values.end());
  for (std::size_t j = 0; j < x_values.size(); ++j) {
    out.cdf.push_back(static_cast<double>(below[j]) / static_cast<double>(accepted));
    out.ci.push_back(wilson_interval(below[j], accepted));
  }
  return out;
}

}  // namespace hetnetcov
