#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hetnetcov/rng.hpp"

namespace hetnetcov {

// One base station of a sampled point process, position relative to the
// origin (where the typical user sits).
struct Point {
  double x = 0.0;
  double y = 0.0;
  double r = 0.0;  // cached Euclidean norm, always > 0
};

struct PppRealization {
  std::vector<Point> points;  // unordered
  double window_radius_m = 0.0;
  double density_per_m2 = 0.0;
};

// Homogeneous PPP on a disc of radius `window_radius_m` centred at the
// origin: Poisson count with mean lambda*pi*R^2, positions i.i.d. uniform.
PppRealization sample_ppp(double density_per_m2, double window_radius_m, Rng& rng);

// The n nearest points sorted by distance, ties broken by original index.
// Throws InsufficientPointsError when the realization has fewer than n.
std::vector<Point> nearest_candidates(const PppRealization& ppp, std::size_t n);

// Joint density of the ordered distances (r_1 < ... < r_n) from the origin
// to the n nearest points of a PPP with intensity `density_per_m2`:
//   (2 pi lambda)^n * prod_i r_i * exp(-lambda pi r_n^2)
// Zero off the ordered positive cone.
double ordered_distance_pdf(std::span<const double> r, double density_per_m2);
double ordered_distance_logpdf(std::span<const double> r, double density_per_m2);

// Draws (r_1, ..., r_n) directly: pi*lambda*r_i^2 is a unit-rate Poisson
// arrival time, so cumulative sums of Exp(1) variates map to radii.
std::vector<double> sample_ordered_distances(std::size_t n, double density_per_m2, Rng& rng);

// Writes "x,y,r" rows for debugging dumps.
void dump_realization_csv(const PppRealization& ppp, const std::string& path);

}  // namespace hetnetcov
