#include "hetnetcov/tier.hpp"

#include <cmath>

#include "hetnetcov/units.hpp"

namespace hetnetcov {

LinearTierParams derive_linear(const TierParams& tier) {
  LinearTierParams lin;
  lin.density = tier.density_per_m2;
  lin.tx_watts = dbm_to_watts(tier.tx_power_dbm);
  lin.b_nlos = lin.tx_watts * db_to_linear(-tier.intercept_nlos_db);
  lin.b_los = lin.tx_watts * db_to_linear(-tier.intercept_los_db);
  lin.exponent_nlos = tier.exponent_nlos;
  lin.exponent_los = tier.exponent_los;
  lin.sigma_s_nlos = std::fabs(kDbLogSlope) * tier.shadow_sigma_nlos_db;
  lin.sigma_s_los = std::fabs(kDbLogSlope) * tier.shadow_sigma_los_db;
  return lin;
}

std::vector<std::string> check_tier(const TierParams& tier, const std::string& label) {
  std::vector<std::string> bad;
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(tier.density_per_m2) || tier.density_per_m2 <= 0.0)
    bad.push_back(label + ": density must be positive and finite");
  if (!finite(tier.tx_power_dbm)) bad.push_back(label + ": tx power must be finite");
  if (!finite(tier.intercept_nlos_db) || !finite(tier.intercept_los_db))
    bad.push_back(label + ": intercepts must be finite");
  if (!finite(tier.exponent_nlos) || tier.exponent_nlos <= 0.0)
    bad.push_back(label + ": blocked-path exponent must be positive");
  if (!finite(tier.exponent_los) || tier.exponent_los <= 0.0)
    bad.push_back(label + ": clear-path exponent must be positive");
  if (!finite(tier.shadow_sigma_nlos_db) || tier.shadow_sigma_nlos_db < 0.0)
    bad.push_back(label + ": blocked-path shadow sigma must be >= 0");
  if (!finite(tier.shadow_sigma_los_db) || tier.shadow_sigma_los_db < 0.0)
    bad.push_back(label + ": clear-path shadow sigma must be >= 0");
  if (tier.blockage_kappa_per_m &&
      (!finite(*tier.blockage_kappa_per_m) || *tier.blockage_kappa_per_m < 0.0))
    bad.push_back(label + ": blockage rate override must be >= 0");
  return bad;
}

std::vector<std::string> tier_warnings(const TierParams& tier, const std::string& label) {
  std::vector<std::string> warn;
  if (tier.exponent_nlos <= tier.exponent_los)
    warn.push_back(label + ": blocked-path exponent does not exceed clear-path exponent; " +
                   "unusual but allowed");
  return warn;
}

}  // namespace hetnetcov
