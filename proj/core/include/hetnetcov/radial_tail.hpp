#pragma once

#include <complex>
#include <span>
#include <vector>

namespace hetnetcov {

// Scalar kernel of the far-field PGFL exponent.  For path-loss exponent
// alpha > 2 and complex b,
//   J(b) = integral_1^inf (1 - exp(-b u^-alpha)) u du
//        = (1/alpha) integral_0^1 (1 - exp(-b p)) p^(-c-1) dp,   c = 2/alpha.
// Entire in b; for Re b >= 0 it satisfies |arg J| < pi and Re J >= 0.
// Three evaluation regimes: power series (|b| <= 0.5), a regularized
// finite-interval quadrature (mid range), and a large-|b| expansion
//   J(b) = (Gamma(1-c) b^c - 1)/2 + (1/alpha) T(b)
// with T evaluated by a backward by-parts recursion (Re b >= 0 only).
class RadialPgflIntegral {
 public:
  explicit RadialPgflIntegral(double alpha);

  std::complex<double> operator()(std::complex<double> b) const;

  double alpha() const { return alpha_; }
  double c() const { return c_; }

  // Regime boundaries, exposed so the spline table can mirror them.
  static constexpr double kSeriesLimit = 0.5;
  static constexpr double kAsymptoticLimit = 40.0;

 private:
  std::complex<double> series(std::complex<double> b) const;
  std::complex<double> mid_quadrature(std::complex<double> b) const;
  std::complex<double> asymptotic(std::complex<double> b) const;

  double alpha_;
  double c_;          // 2/alpha in (0, 1)
  double pexp_;       // 1/(1-c), exponent of the regularizing substitution
  double gamma_1mc_;  // Gamma(1-c)
};

// Cubic (Catmull-Rom) interpolant of J along one fixed ray arg(b) = theta,
// parameterized by ln|b| on [x_min, x_max].  J is smooth and slowly varying
// in ln|b|, so ~1e3 points deliver ~1e-10 relative accuracy.
class RadialPgflRay {
 public:
  RadialPgflRay(const RadialPgflIntegral& fn, double theta, double x_min, double x_max, int points);

  std::complex<double> eval(double ln_abs_b) const;

  double x_min() const { return x_min_; }
  double x_max() const { return x_min_ + h_ * segments_; }

 private:
  double x_min_, h_, inv_h_;
  int segments_;
  std::vector<std::complex<double>> v_;  // values at x_min + (i-1)h, i = 0..segments_+2
};

// Ray family matching a fixed set of transform-node angles (the inversion
// nodes s = delta_k / x keep arg(s) fixed as x varies, and the far-field
// argument b inherits that angle).  Outside the spline window the direct
// regimes are cheap and are used as-is.
class RadialPgflRayTable {
 public:
  RadialPgflRayTable(double alpha, std::span<const std::complex<double>> node_angles_from);

  // b must lie on ray `ray` (same angle as node_angles_from[ray]).
  std::complex<double> eval(std::size_t ray, std::complex<double> b, double ln_abs_b) const;

  const RadialPgflIntegral& fn() const { return fn_; }
  std::size_t ray_count() const { return rays_.size(); }

  // Worst relative interpolation error over off-grid probe points; used by
  // the engine self check.
  double probe_accuracy() const;

 private:
  RadialPgflIntegral fn_;
  std::vector<RadialPgflRay> rays_;
  std::vector<double> thetas_;
  double x_lo_, x_hi_;
};

}  // namespace hetnetcov
