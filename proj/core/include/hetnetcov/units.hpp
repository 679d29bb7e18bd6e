#pragma once

#include <cmath>
#include <numbers>

namespace hetnetcov {

// All internal quantities are SI linear: watts, meters, per-square-meter
// densities.  dB / dBm appear only at configuration and reporting edges.

inline double dbm_to_watts(double p_dbm) { return std::pow(10.0, (p_dbm - 30.0) / 10.0); }

inline double watts_to_dbm(double p_watts) { return 10.0 * std::log10(p_watts) + 30.0; }

inline double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }

inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

// Slope turning a dB-valued Gaussian into a log-power Gaussian:
// ln P picks up (beta * xi) when the dB path loss picks up +xi.
inline constexpr double kDbLogSlope = -std::numbers::ln10 / 10.0;

}  // namespace hetnetcov
