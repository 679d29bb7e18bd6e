#include "hetnetcov/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hetnetcov/errors.hpp"

namespace hetnetcov {

InversionMethod parse_inversion_method(const std::string& name) {
  if (name == "talbot") return InversionMethod::talbot;
  if (name == "euler") return InversionMethod::euler;
  throw ValidationError("unknown inversion method '" + name + "'");
}

NodeTable talbot_table(int node_count) {
  if (node_count < 8) throw ValidationError("talbot_table: need at least 8 nodes");
  const int m = node_count;
  NodeTable tbl;
  tbl.method = InversionMethod::talbot;
  tbl.nodes.resize(m);
  tbl.weights.resize(m);

  const double scale = 2.0 / 5.0;
  tbl.nodes[0] = {2.0 * m / 5.0, 0.0};
  tbl.weights[0] = scale * 0.5 * std::exp(tbl.nodes[0]);
  for (int k = 1; k < m; ++k) {
    const double theta = k * std::numbers::pi / m;
    const double cot = std::cos(theta) / std::sin(theta);
    const std::complex<double> delta(scale * k * std::numbers::pi * cot, scale * k * std::numbers::pi);
    const std::complex<double> correction(1.0, theta * (1.0 + cot * cot) - cot);
    tbl.nodes[k] = delta;
    tbl.weights[k] = scale * std::exp(delta) * correction;
  }
  return tbl;
}

NodeTable euler_table(int terms) {
  if (terms < 1) throw ValidationError("euler_table: need at least 1 term");
  const int m = terms;
  const int count = 2 * m + 1;
  NodeTable tbl;
  tbl.method = InversionMethod::euler;
  tbl.nodes.resize(count);
  tbl.weights.resize(count);

  const double a = m * std::numbers::ln10 / 3.0;
  for (int k = 0; k < count; ++k) tbl.nodes[k] = {a, std::numbers::pi * k};

  // Binomial averaging of the last m partial sums of the alternating series.
  std::vector<double> xi(count, 1.0);
  xi[0] = 0.5;
  const double two_pow = std::ldexp(1.0, -m);
  xi[2 * m] = two_pow;
  double binom = 1.0;  // C(m, 0)
  for (int k = 1; k < m; ++k) {
    binom *= static_cast<double>(m - k + 1) / k;
    xi[2 * m - k] = xi[2 * m - k + 1] + two_pow * binom;
  }
  const double front = std::pow(10.0, m / 3.0);
  for (int k = 0; k < count; ++k) tbl.weights[k] = front * (k % 2 == 0 ? xi[k] : -xi[k]);
  return tbl;
}

namespace {

double invert_impl(const NodeTable& tbl, const LaplaceFn& lt, double x, bool cdf,
                   InversionDiagnostics* diag) {
  if (!(x > 0.0)) throw ValidationError("laplace inversion requires x > 0");
  double sum = 0.0;
  double max_term = 0.0;
  bool finite = true;
  for (std::size_t k = 0; k < tbl.nodes.size(); ++k) {
    const std::complex<double> s = tbl.nodes[k] / x;
    std::complex<double> val = lt(s);
    if (cdf) val /= s;
    const double term = (tbl.weights[k] * val).real();
    if (!std::isfinite(term)) {
      finite = false;
      continue;
    }
    max_term = std::max(max_term, std::abs(term));
    sum += term;
  }
  const double result = sum / x;
  if (diag) {
    diag->max_term_magnitude = max_term / x;
    diag->result_magnitude = std::abs(result);
    diag->finite = finite;
  }
  return finite ? result : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double invert_density(const NodeTable& tbl, const LaplaceFn& lt, double x, InversionDiagnostics* diag) {
  return invert_impl(tbl, lt, x, false, diag);
}

double invert_cdf(const NodeTable& tbl, const LaplaceFn& lt, double x, InversionDiagnostics* diag) {
  return invert_impl(tbl, lt, x, true, diag);
}

double inversion_self_test(const NodeTable& tbl, double tol) {
  const LaplaceFn exp_lt = [](std::complex<double> s) { return 1.0 / (1.0 + s); };
  const LaplaceFn gamma2_lt = [](std::complex<double> s) { return 1.0 / ((1.0 + s) * (1.0 + s)); };

  double worst = 0.0;
  for (double x = 0.25; x <= 10.0; x += 0.25) {
    worst = std::max(worst, std::abs(invert_density(tbl, exp_lt, x) - std::exp(-x)));
    worst = std::max(worst, std::abs(invert_cdf(tbl, exp_lt, x) - (-std::expm1(-x))));
    worst = std::max(worst, std::abs(invert_density(tbl, gamma2_lt, x) - x * std::exp(-x)));
    worst = std::max(worst, std::abs(invert_cdf(tbl, gamma2_lt, x) - (1.0 - (1.0 + x) * std::exp(-x))));
  }
  if (!(worst < tol))
    throw InversionUnstableError("inversion self test failed: worst error " + std::to_string(worst) +
                                 " exceeds " + std::to_string(tol));
  return worst;
}

}  // namespace hetnetcov
