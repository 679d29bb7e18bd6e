#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hetnetcov/config.hpp"
#include "hetnetcov/rng.hpp"
#include "hetnetcov/stats.hpp"
#include "hetnetcov/tier.hpp"

namespace hetnetcov {

// One simulated tier deployment as seen from the origin.  The SIR of a
// candidate counts every other base station of the same tier as
// interference; with a single station in the window the SIR is +infinity.
struct TierRealization {
  std::vector<double> candidate_r;      // n nearest, ascending
  std::vector<double> candidate_power;  // received powers of those candidates
  std::size_t winner_by_power = 0;      // argmax candidate_power
  std::size_t winner_by_sir = 0;        // argmax SIR; equal except exact ties
  double winner_sir = 0.0;              // best candidate SIR
  bool power_tie = false;               // exact power tie among candidates
  std::size_t station_count = 0;        // all stations in the window
};

// Simulation window radius for one tier: the configured override, or a
// radius where the neglected all-NLOS tail is below 1e-4 of the mean
// interference at the typical serving distance sqrt(n / (pi lambda)), and
// where the expected station count comfortably exceeds n.
double mc_window_radius(const NetworkConfig& cfg, std::size_t tier_index);

// As above with the tier's density replaced (density sweeps reuse one
// window across all sweep values).
double mc_window_radius_at_density(const NetworkConfig& cfg, std::size_t tier_index,
                                   double density_per_m2);

// Draws one realization of a single tier and scores its candidates.
// Throws InsufficientPointsError when the window holds fewer than n
// stations (vanishingly rare under auto window sizing).
TierRealization simulate_tier_realization(const NetworkConfig& cfg, std::size_t tier_index,
                                          double window_radius_m, Rng& rng);

struct McTierCoverage {
  std::size_t tier_index = 0;  // 0-based
  std::vector<double> pc;      // per gamma
  std::vector<WilsonInterval> ci;
  std::vector<std::uint64_t> hits;
  std::vector<double> assoc_frequency;  // winner index histogram, size n
  std::uint64_t tie_count = 0;
  std::uint64_t redraws = 0;  // realizations redrawn for holding < n stations
  double window_radius_m = 0.0;
  double mean_station_count = 0.0;
};

struct CoverageResult {
  std::vector<double> gamma_linear;
  std::vector<McTierCoverage> tiers;
  std::vector<double> network_pc;  // per gamma: any tier's best SIR above threshold
  std::vector<WilsonInterval> network_ci;
  std::uint64_t realizations = 0;
};

// Full coverage estimate over a shared set of SIR thresholds.  One random
// substream per (tier, realization index), so results are independent of
// the thread count, every gamma is evaluated on common random numbers
// (exactly monotone estimates), and dropping a tier leaves the remaining
// tiers' draws unchanged.
CoverageResult estimate_coverage(const NetworkConfig& cfg, std::span<const double> gamma_linear,
                                 std::vector<std::string>* warnings = nullptr);

struct DensitySweepPoint {
  double density_per_m2 = 0.0;
  double pc = 0.0;
  WilsonInterval ci;
};

struct DensitySweepResult {
  std::size_t tier_index = 0;  // 0-based swept tier
  double gamma_linear = 1.0;
  std::vector<DensitySweepPoint> points;
  std::uint64_t realizations = 0;
};

// Network coverage against the swept tier's density, all points coupled by
// independent thinning of one deployment drawn at the largest density (so
// sweep points share randomness and comparisons are low-variance).
DensitySweepResult mc_density_sweep(const NetworkConfig& cfg,
                                    std::vector<std::string>* warnings = nullptr);

struct LtEstimate {
  std::vector<double> s;
  std::vector<double> mean;  // E[exp(-s I)]
  std::vector<double> se;
};

// Shot-noise estimate of the far-field interference transform beyond r_n
// (every station NLOS, matching the analytic far-field model), for
// transform-level cross-checks at real s.
LtEstimate mc_far_lt(const NetworkConfig& cfg, std::size_t tier_index, double r_n,
                     std::span<const double> s_values, std::uint64_t realizations,
                     std::uint64_t seed);

struct ConditionalCdfEstimate {
  std::vector<double> x;
  std::vector<double> cdf;
  std::vector<WilsonInterval> ci;
  std::uint64_t accepted = 0;
  std::uint64_t attempts = 0;
};

// Rejection estimate of P(I <= x | all peer powers <= t) at fixed candidate
// distances: peer powers redrawn until all fall below t, far field all-NLOS
// beyond the last candidate.  Throws InsufficientConditionalSamplesError if
// fewer than 500 acceptances arrive within the attempt budget.
ConditionalCdfEstimate mc_conditional_interference_cdf(const NetworkConfig& cfg,
                                                       std::size_t tier_index, std::size_t m,
                                                       double t, std::span<const double> distances,
                                                       std::span<const double> x_values,
                                                       std::uint64_t target_accepted,
                                                       std::uint64_t seed);

}  // namespace hetnetcov
