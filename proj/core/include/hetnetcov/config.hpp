#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hetnetcov/tier.hpp"

namespace hetnetcov {

struct McControls {
  std::uint64_t realizations = 20000;
  std::uint64_t seed = 1;
  double window_radius_m = 0.0;  // 0 = size automatically from the tail bound
  bool farfield_all_nlos = false;
  std::uint32_t debug_dump_realizations = 0;
  unsigned threads = 0;  // 0 = all hardware threads
};

struct QuadControls {
  int gauss_hermite_nodes = 64;
  int talbot_nodes = 32;
  int euler_terms = 15;  // 2*euler_terms + 1 transform evaluations per inversion
  // "auto" routes interference inversions to the Euler family (every node in
  // the right half-plane, required for shadowed interference transforms) and
  // leaves Talbot for transforms it can handle.  "talbot"/"euler" force one.
  std::string inversion_method = "auto";
  double far_tail_rel_tol = 1e-10;
  int distance_samples = 20000;
  bool distance_tensor_quadrature = false;  // closed quadrature over distances, n <= 2 only
  int t_panel_points = 8;
  double t_panel_sigma_fraction = 0.5;
  double t_range_sigmas = 8.5;
  double prune_rel_tol = 1e-7;
  bool self_check = true;
  unsigned threads = 0;
};

struct SweepSpec {
  std::vector<double> gamma_db;  // strictly increasing, nonempty
  // Optional density sweep (one tier's intensity varied at a fixed threshold).
  int density_tier = 0;  // 1-based tier index; 0 = no density sweep configured
  std::vector<double> density_values_per_m2;
  double density_gamma_db = 0.0;
};

struct NetworkConfig {
  std::vector<TierParams> tiers;
  double blockage_kappa_per_m = 0.0;
  int n_candidates = 1;
  McControls mc;
  QuadControls quad;
  SweepSpec sweep;

  double effective_kappa(std::size_t tier_index) const {
    const auto& t = tiers.at(tier_index);
    return t.blockage_kappa_per_m ? *t.blockage_kappa_per_m : blockage_kappa_per_m;
  }
};

enum class RunMode { analytic, montecarlo, both };

// Parses the flat key-value config format (see configs/*.cfg for the schema).
// Throws ValidationError with every violation listed when the file is
// malformed or fails validation for the given mode.
NetworkConfig load_config(const std::string& path, RunMode mode);

// Collects violations/warnings without throwing.  Returns true when the
// config is usable in `mode`.
bool validate_config(const NetworkConfig& cfg, RunMode mode,
                     std::vector<std::string>& violations,
                     std::vector<std::string>& warnings);

// FNV-1a 64-bit content hash, used to pin configs inside run manifests.
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace hetnetcov
