#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace hetnetcov {

// Numerical inversion of Laplace transforms on the Abate-Whitt pattern
//   f(x) ~ (1/x) * sum_k Re( eta_k * F(delta_k / x) ).
//
// Two node families are provided.  Talbot converges fast but places nodes in
// the left half-plane, so it requires F analytic there; transforms of
// lognormally shadowed interference are analytic only for Re s > 0 and must
// use the Euler family (all nodes at Re = M ln10 / 3 > 0).

enum class InversionMethod { talbot, euler };

InversionMethod parse_inversion_method(const std::string& name);

struct NodeTable {
  InversionMethod method = InversionMethod::talbot;
  std::vector<std::complex<double>> nodes;    // delta_k
  std::vector<std::complex<double>> weights;  // eta_k (real for Euler)
};

NodeTable talbot_table(int node_count);

// Euler summation table with `terms` acceleration terms; evaluates the
// transform at 2*terms + 1 points.
NodeTable euler_table(int terms);

struct InversionDiagnostics {
  double max_term_magnitude = 0.0;
  double result_magnitude = 0.0;
  bool finite = true;
  // Heuristic blowup flag: individual terms dwarf the sum by many orders, or
  // a term is non-finite.  Catches Talbot applied outside its validity strip.
  bool unstable() const { return !finite || max_term_magnitude > 1e8 * std::max(result_magnitude, 1e-12); }
};

using LaplaceFn = std::function<std::complex<double>(std::complex<double>)>;

// Recovers f(x) from F = L{f}.  x must be > 0.
double invert_density(const NodeTable& tbl, const LaplaceFn& lt, double x,
                      InversionDiagnostics* diag = nullptr);

// Recovers the CDF of f at x by inverting F(s)/s.
double invert_cdf(const NodeTable& tbl, const LaplaceFn& lt, double x,
                  InversionDiagnostics* diag = nullptr);

// Round-trip accuracy gate over known transform pairs (exponential, gamma).
// Returns the worst absolute error; throws InversionUnstableError when the
// table cannot reproduce them to `tol`.
double inversion_self_test(const NodeTable& tbl, double tol = 1e-8);

}  // namespace hetnetcov
