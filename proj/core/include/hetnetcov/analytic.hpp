#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hetnetcov/config.hpp"
#include "hetnetcov/laplace.hpp"
#include "hetnetcov/propagation.hpp"
#include "hetnetcov/radial_tail.hpp"
#include "hetnetcov/tier.hpp"

namespace hetnetcov {

// Bundle of one tier's constants plus the knobs the transform evaluators
// need.  All analytic operations below are pure given this context.
struct AnalyticContext {
  LinearTierParams tier;
  double kappa_per_m = 0.0;
  QuadControls quad;
};

// Expected single-link transform factor at distance v over the shadowing
// distribution of the always-NLOS far field:
//   E[exp(-s * B_N * v^-alpha_N * e^(beta xi))],  xi ~ N(0, sigma_N_dB^2),
// by Gauss-Hermite quadrature.  Node count grows with |Im s|*B_N*v^-alpha
// (integrand oscillation), capped at 512.
std::complex<double> far_link_lt_factor(const AnalyticContext& ctx, double v, std::complex<double> s);

// Laplace transform of the aggregate far-field interference beyond radius
// r_n (all links NLOS):  exp{-2 pi lambda Int_{r_n}^inf [1 - factor(v,s)] v dv}.
// The radial integral reduces to the entire kernel J of radial_tail.hpp, so
// no tail truncation is involved.  Requires exponent_nlos > 2
// (TailNotConverged otherwise).  |result| <= 1 for Re s >= 0.
std::complex<double> lt_far_interference(const AnalyticContext& ctx, std::complex<double> s, double r_n);

// Reference evaluation of the same transform by direct radial quadrature out
// to an adaptive cutoff R with the analytic remainder bound
//   remainder <= |s| B_N E[e^(beta xi)] R^(2-alpha)/(alpha-2)
// kept below far_tail_rel_tol of the accumulated integral.  Slow; used for
// cross-checks at moderate |s|.
std::complex<double> lt_far_interference_radial(const AnalyticContext& ctx, std::complex<double> s,
                                                double r_n);

// LT of one candidate's received power conditioned on P <= t at distance r:
//   E[e^(-sP) | P <= t] (normalized; 1 at s = 0).
// Throws ZeroMass when P(P <= t) underflows.
std::complex<double> lt_truncated_power(const AnalyticContext& ctx, std::complex<double> s, double t,
                                        double r);

// Same integral without the normalization: E[e^(-sP) 1{P <= t}].  The
// fused coverage path uses this form so near-zero conditioning masses never
// appear in a denominator.
std::complex<double> lt_truncated_power_unnormalized(const AnalyticContext& ctx, std::complex<double> s,
                                                     double t, double r);

// Product of the peers' truncated-power LTs (candidates j != m, all
// conditioned on P_j <= t).  Empty product (n = 1) gives 1.
std::complex<double> lt_near_interference(const AnalyticContext& ctx, std::complex<double> s,
                                          std::size_t m, double t, std::span<const double> distances);

// Distribution of the total interference seen by candidate m, conditioned on
// the candidate distances and on every peer power <= t: recovered from the
// product transform (near x far) by numerical inversion.  Normalized (the
// conditioning mass is divided out).
class ConditionalInterferenceDist {
 public:
  ConditionalInterferenceDist(const AnalyticContext& ctx, std::size_t m, double t,
                              std::span<const double> distances);

  double pdf(double x) const;
  double cdf(double x) const;

  // E[e^(-sI) | conditioning]; exposed for transform-level diagnostics.
  std::complex<double> lt(std::complex<double> s) const;

  double conditioning_mass() const { return mass_; }

 private:
  double invert(double x, bool density) const;

  AnalyticContext ctx_;
  std::size_t m_;
  double t_;
  std::vector<double> distances_;
  double r_far_;
  double mass_;  // prod_j F_j(t)
  NodeTable table_;
};

// P(I_m <= t/gamma | candidate distances, peers <= t).
double conditional_coverage(const AnalyticContext& ctx, std::size_t m, double t,
                            std::span<const double> distances, double gamma_linear);

// Joint probability P(I_m <= t/gamma AND all peers <= t | distances)
//  = conditional_coverage x prod_{j != m} F_{P_j}(t | r_j).
double decondition_peers(const AnalyticContext& ctx, std::size_t m, double t,
                         std::span<const double> distances, double gamma_linear);

// Removes the conditioning on the associated candidate's power level:
//   Int_0^inf f_{P_m}(t | r_m) * decondition_peers(m, t, ...) dt.
// This is P(candidate m wins AND its SIR >= gamma | distances).
double decondition_power(const AnalyticContext& ctx, std::size_t m,
                         std::span<const double> distances, double gamma_linear);

struct TierCoverageTable {
  std::size_t tier_index = 0;              // 0-based
  std::vector<double> gamma_linear;
  std::vector<std::vector<double>> term;     // [gamma][m], association-and-coverage probability
  std::vector<std::vector<double>> term_se;  // distance-sampling standard errors
  std::vector<double> pc;                    // per-gamma sum over m
  std::vector<double> pc_se;
  std::uint64_t distance_samples = 0;
};

struct NetworkCoverageTable {
  std::vector<double> gamma_linear;
  std::vector<double> pc;
  std::vector<double> pc_se;
  std::vector<TierCoverageTable> tiers;
};

// Semi-analytic coverage evaluator.  Heavy tables (inversion nodes, far-field
// ray splines, shadowing nodes) are built once per tier at construction; the
// outer expectation over ordered candidate distances is taken by common
// random-number sampling of their joint law (or tensor quadrature for
// n <= 2 when quad.distance_tensor_quadrature is set).
class AnalyticEngine {
 public:
  explicit AnalyticEngine(const NetworkConfig& cfg);
  ~AnalyticEngine();

  AnalyticEngine(const AnalyticEngine&) = delete;
  AnalyticEngine& operator=(const AnalyticEngine&) = delete;

  TierCoverageTable tier_coverage(std::size_t tier_index, std::span<const double> gamma_linear) const;
  NetworkCoverageTable network_coverage(std::span<const double> gamma_linear) const;

  const NetworkConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// 1 - prod_k (1 - pc_k), with the delta-method standard error.
void combine_network_coverage(NetworkCoverageTable& table);

}  // namespace hetnetcov
