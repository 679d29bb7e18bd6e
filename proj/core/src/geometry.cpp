#include "hetnetcov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>

#include "hetnetcov/errors.hpp"

namespace hetnetcov {

PppRealization sample_ppp(double density_per_m2, double window_radius_m, Rng& rng) {
  if (!(density_per_m2 > 0.0) || !(window_radius_m > 0.0))
    throw ValidationError("sample_ppp requires positive density and window radius");

  PppRealization out;
  out.window_radius_m = window_radius_m;
  out.density_per_m2 = density_per_m2;

  const double mean = density_per_m2 * std::numbers::pi * window_radius_m * window_radius_m;
  const std::uint64_t count = rng.poisson(mean);
  out.points.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    // Radius via inverse transform of the disc area measure. uniform() is
    // open-interval so r > 0 always holds; the loop guards the impossible.
    double r = 0.0;
    do {
      r = window_radius_m * std::sqrt(rng.uniform());
    } while (!(r > 0.0));
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    out.points.push_back(Point{r * std::cos(theta), r * std::sin(theta), r});
  }
  return out;
}

std::vector<Point> nearest_candidates(const PppRealization& ppp, std::size_t n) {
  if (ppp.points.size() < n)
    throw InsufficientPointsError("realization holds " + std::to_string(ppp.points.size()) +
                                  " points, need " + std::to_string(n) +
                                  "; enlarge the window or raise the density");

  std::vector<std::size_t> idx(ppp.points.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto closer = [&](std::size_t a, std::size_t b) {
    if (ppp.points[a].r != ppp.points[b].r) return ppp.points[a].r < ppp.points[b].r;
    return a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end(), closer);

  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(ppp.points[idx[i]]);
  return out;
}

double ordered_distance_logpdf(std::span<const double> r, double density_per_m2) {
  if (r.empty() || !(density_per_m2 > 0.0)) return -std::numeric_limits<double>::infinity();
  double prev = 0.0;
  double log_prod = 0.0;
  for (double ri : r) {
    if (!(ri > prev)) return -std::numeric_limits<double>::infinity();
    log_prod += std::log(ri);
    prev = ri;
  }
  const double lam_pi = density_per_m2 * std::numbers::pi;
  const double n = static_cast<double>(r.size());
  return n * std::log(2.0 * lam_pi) + log_prod - lam_pi * r.back() * r.back();
}

double ordered_distance_pdf(std::span<const double> r, double density_per_m2) {
  return std::exp(ordered_distance_logpdf(r, density_per_m2));
}

std::vector<double> sample_ordered_distances(std::size_t n, double density_per_m2, Rng& rng) {
  if (!(density_per_m2 > 0.0)) throw ValidationError("sample_ordered_distances requires positive density");
  std::vector<double> out(n);
  const double lam_pi = density_per_m2 * std::numbers::pi;
  double cum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cum += rng.exponential();
    out[i] = std::sqrt(cum / lam_pi);
  }
  return out;
}

void dump_realization_csv(const PppRealization& ppp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "x,y,r\n";
  char buf[96];
  for (const Point& p : ppp.points) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.x, p.y, p.r);
    out << buf;
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace hetnetcov
