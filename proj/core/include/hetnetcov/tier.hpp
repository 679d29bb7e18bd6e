#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hetnetcov {

// One base-station tier: a homogeneous planar Poisson process plus the
// propagation law its links obey.  Configuration-facing units (dBm, dB);
// see LinearTierParams for the internal linear form.
struct TierParams {
  double density_per_m2 = 0.0;       // PPP intensity, > 0
  double tx_power_dbm = 0.0;
  double intercept_nlos_db = 0.0;    // path-loss intercept at 1 m, through blockage
  double intercept_los_db = 0.0;     // path-loss intercept at 1 m, clear path
  double exponent_nlos = 0.0;        // distance exponent, > 0
  double exponent_los = 0.0;         // distance exponent, > 0
  double shadow_sigma_nlos_db = 0.0; // shadowing spread, >= 0
  double shadow_sigma_los_db = 0.0;  // shadowing spread, >= 0

  // Optional per-tier blockage rate; when absent the shared network value
  // applies.  Units 1/m.
  std::optional<double> blockage_kappa_per_m;
};

// The same tier in linear units: received power on a branch at distance r is
// b * r^(-exponent) * exp(log_shadow), with log_shadow ~ N(0, sigma_s^2).
struct LinearTierParams {
  double density = 0.0;   // per m^2
  double tx_watts = 0.0;
  double b_nlos = 0.0;    // watts at 1 m
  double b_los = 0.0;
  double exponent_nlos = 0.0;
  double exponent_los = 0.0;
  double sigma_s_nlos = 0.0;  // std dev of ln(power)
  double sigma_s_los = 0.0;
};

LinearTierParams derive_linear(const TierParams& tier);

// Hard violations (empty when the tier is usable).  `label` names the tier
// in messages, e.g. "tier 2".
std::vector<std::string> check_tier(const TierParams& tier, const std::string& label);

// Non-fatal oddities, e.g. a clear-path exponent at or above the blocked one.
std::vector<std::string> tier_warnings(const TierParams& tier, const std::string& label);

}  // namespace hetnetcov
