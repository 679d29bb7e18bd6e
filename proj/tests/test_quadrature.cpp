#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "hetnetcov/quadrature.hpp"

using hetnetcov::gauss_hermite;
using hetnetcov::gauss_legendre;
using hetnetcov::gl_integrate;

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  const auto& q = gauss_legendre(8);
  REQUIRE(q.x.size() == 8);
  // int_-1^1 x^k dx = 2/(k+1) for even k, 0 for odd k, exact through k = 15.
  for (int k = 0; k <= 15; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) acc += q.w[i] * std::pow(q.x[i], k);
    const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
    CHECK(std::fabs(acc - exact) < 1e-14);
  }
}

TEST_CASE("gauss-legendre weights sum to the interval length") {
  for (int n : {2, 8, 16, 40}) {
    const auto& q = gauss_legendre(n);
    double w = 0.0;
    for (double wi : q.w) w += wi;
    CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("gauss-hermite reproduces gaussian moments") {
  const auto& q = gauss_hermite(32);
  REQUIRE(q.x.size() == 32);
  // int exp(-z^2) z^(2k) dz = Gamma(k + 1/2).
  const double spi = std::sqrt(std::numbers::pi);
  const double exact[] = {spi, spi / 2, 3 * spi / 4, 15 * spi / 8, 105 * spi / 16};
  for (int k = 0; k <= 4; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) acc += q.w[i] * std::pow(q.x[i], 2 * k);
    CHECK(acc == doctest::Approx(exact[k]).epsilon(1e-13));
  }
}

TEST_CASE("node tables are cached per order") {
  CHECK(&gauss_legendre(8) == &gauss_legendre(8));
  CHECK(&gauss_hermite(64) == &gauss_hermite(64));
  CHECK(&gauss_legendre(8) != &gauss_legendre(16));
}

TEST_CASE("gl_integrate on a shifted interval") {
  const auto& q = gauss_legendre(24);
  const double v = gl_integrate(q, 0.0, std::numbers::pi, [](double x) { return std::sin(x); });
  CHECK(v == doctest::Approx(2.0).epsilon(1e-14));
  // Complex-valued integrands flow through the same template.
  const std::complex<double> z =
      gl_integrate(q, 0.0, 1.0, [](double x) { return std::complex<double>(x, -x * x); });
  CHECK(z.real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(z.imag() == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
}
