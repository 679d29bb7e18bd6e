#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "hetnetcov/radial_tail.hpp"
#include "reference_values.hpp"

using hetnetcov::RadialPgflIntegral;
using hetnetcov::RadialPgflRay;
using hetnetcov::RadialPgflRayTable;
using cd = std::complex<double>;

TEST_CASE("kernel matches quadrature references on the real axis") {
  // Rows straddle both regime boundaries (0.5 and 40), so a mismatch between
  // the series, quadrature, and asymptotic branches cannot hide.
  double alpha = -1.0;
  RadialPgflIntegral fn(4.28);
  for (const auto& row : refvals::kRadialKernelReal) {
    if (row.alpha != alpha) {
      alpha = row.alpha;
      fn = RadialPgflIntegral(alpha);
    }
    CHECK(fn(cd(row.b, 0.0)).real() == doctest::Approx(row.j).epsilon(1e-11));
    CHECK(std::fabs(fn(cd(row.b, 0.0)).imag()) < 1e-11 * row.j);
  }
}

TEST_CASE("kernel matches quadrature references on transform rays") {
  double alpha = -1.0;
  RadialPgflIntegral fn(4.28);
  for (const auto& row : refvals::kRadialKernelComplex) {
    if (row.alpha != alpha) {
      alpha = row.alpha;
      fn = RadialPgflIntegral(alpha);
    }
    const cd got = fn(row.b);
    CHECK(std::abs(got - row.j) < 1e-11 * std::abs(row.j));
  }
}

TEST_CASE("kernel range constraints for nonnegative real part") {
  const RadialPgflIntegral fn(3.4);
  for (double mag : {1e-4, 0.3, 2.0, 25.0, 300.0}) {
    for (double ang : {0.0, 0.5, 1.2, 1.5}) {
      const cd j = fn(std::polar(mag, ang));
      CHECK(j.real() >= 0.0);
      CHECK(std::fabs(std::arg(j)) < std::numbers::pi);
    }
  }
}

TEST_CASE("kernel is continuous across regime boundaries") {
  for (double alpha : {2.42, 4.28}) {
    const RadialPgflIntegral fn(alpha);
    for (double b0 : {RadialPgflIntegral::kSeriesLimit, RadialPgflIntegral::kAsymptoticLimit}) {
      const cd lo = fn(cd(b0 * (1.0 - 1e-9), 0.0));
      const cd hi = fn(cd(b0 * (1.0 + 1e-9), 0.0));
      CHECK(std::abs(hi - lo) < 1e-8 * std::abs(lo));
    }
  }
}

TEST_CASE("ray spline reproduces the kernel off its knots") {
  const RadialPgflIntegral fn(4.28);
  const double theta = 0.9;
  RadialPgflRay ray(fn, theta, std::log(1e-6), std::log(30.0), 2000);
  for (double f : {0.083, 0.317, 0.561, 0.744, 0.987}) {
    const double lx = ray.x_min() + f * (ray.x_max() - ray.x_min());
    const cd exact = fn(std::polar(std::exp(lx), theta));
    CHECK(std::abs(ray.eval(lx) - exact) < 1e-8 * std::abs(exact));
  }
}

TEST_CASE("ray table evaluates exactly outside its window") {
  std::vector<cd> nodes = {cd(11.5, 3.14), cd(11.5, 40.0)};
  const RadialPgflRayTable table(4.28, nodes);
  CHECK(table.ray_count() == nodes.size());
  CHECK(table.probe_accuracy() < 1e-8);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const cd dir = nodes[k] / std::abs(nodes[k]);
    for (double mag : {1e-12, 1e7}) {  // both sides of the spline window
      const cd b = mag * dir;
      const cd direct = table.fn()(b);
      CHECK(std::abs(table.eval(k, b, std::log(mag)) - direct) <= 1e-14 * std::abs(direct));
    }
  }
}
