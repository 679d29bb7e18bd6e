#include "hetnetcov/quadrature.hpp"

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace hetnetcov {

namespace {

// Newton iteration on the Legendre recurrence; nodes are symmetric so only
// half are located.
QuadNodes make_legendre(int n) {
  QuadNodes q;
  q.x.resize(n);
  q.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    q.x[i] = -z;
    q.x[n - 1 - i] = z;
    q.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    q.w[n - 1 - i] = q.w[i];
  }
  return q;
}

// Orthonormal Hermite recurrence (weight exp(-z^2)); weights come from the
// Christoffel sum 1 / sum_j p_j(x)^2, which cannot overflow.
QuadNodes make_hermite(int n) {
  QuadNodes q;
  q.x.resize(n);
  q.w.resize(n);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(n, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * q.x[n - 1];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * q.x[n - 2];
    } else {
      z = 2.0 * z - q.x[n - i + 1];
    }
    double chris = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = pim4, p2 = 0.0;
      chris = p1 * p1;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(double(j) / (j + 1.0)) * p3;
        if (j + 1 < n) chris += p1 * p1;
      }
      // p1 is the orthonormal polynomial of degree n; its derivative at a
      // root is sqrt(2n) * p_{n-1} = sqrt(2n) * p2.
      const double pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15 * std::max(1.0, std::fabs(z))) break;
    }
    q.x[n - 1 - i] = z;
    q.x[i] = -z;
    q.w[n - 1 - i] = 1.0 / chris;
    q.w[i] = q.w[n - 1 - i];
  }
  if (n % 2 == 1) q.x[n / 2] = 0.0;
  return q;
}

template <typename Maker>
const QuadNodes& cached(int n, std::map<int, QuadNodes>& cache, std::mutex& mu, Maker&& maker) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, maker(n)).first;
  return it->second;
}

}  // namespace

const QuadNodes& gauss_legendre(int n) {
  static std::map<int, QuadNodes> cache;
  static std::mutex mu;
  return cached(n, cache, mu, make_legendre);
}

const QuadNodes& gauss_hermite(int n) {
  static std::map<int, QuadNodes> cache;
  static std::mutex mu;
  return cached(n, cache, mu, make_hermite);
}

}  // namespace hetnetcov
