#pragma once

#include <vector>

namespace hetnetcov {

struct QuadNodes {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre nodes/weights on [-1, 1].  Cached per order.
const QuadNodes& gauss_legendre(int n);

// Gauss-Hermite nodes/weights for the weight exp(-z^2) on the real line
// (physicists' convention).  Cached per order.
const QuadNodes& gauss_hermite(int n);

// Integrate f over [a, b] with the given Legendre rule.
template <typename F>
auto gl_integrate(const QuadNodes& q, double a, double b, F&& f) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  decltype(f(mid) * 1.0) acc{};
  for (std::size_t i = 0; i < q.x.size(); ++i) acc += q.w[i] * f(mid + half * q.x[i]);
  return acc * half;
}

}  // namespace hetnetcov
