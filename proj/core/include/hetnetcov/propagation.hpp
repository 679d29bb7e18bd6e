#pragma once

#include <cstddef>

#include "hetnetcov/rng.hpp"
#include "hetnetcov/tier.hpp"

namespace hetnetcov {

// Received power from one base station at distance r is a two-component
// lognormal mixture: the link is non-line-of-sight with probability
// 1 - exp(-kappa r), and conditioned on the branch
//   P = B * r^(-alpha) * exp(beta * xi),   xi ~ N(0, sigma_dB^2),
// so ln P ~ N(mu, sigma_s^2) with mu = ln B - alpha ln r.
struct PowerMixture {
  double p_nlos = 0.0;  // blockage probability at this distance
  double mu_nlos = 0.0;
  double sigma_nlos = 0.0;  // natural-log scale, |beta| * sigma_dB
  double mu_los = 0.0;
  double sigma_los = 0.0;

  double p_los() const { return 1.0 - p_nlos; }
};

double nlos_probability(double r, double kappa_per_m);

// Mixture parameters for a link of length r against one tier.
PowerMixture link_power_law(const LinearTierParams& tier, double r, double kappa_per_m);

// CDF of the mixture at power level x (x <= 0 gives 0).  A zero-sigma
// component degenerates to a step at its median, handled exactly.
double power_cdf(const PowerMixture& m, double x);

// Density of the mixture at x.  Throws DegenerateSigmaError when either
// active component has sigma == 0 (the mixture then has atoms).
double power_pdf(const PowerMixture& m, double x);

// Density of P conditioned on P <= t.  Throws ZeroMassError when the
// conditioning event has probability below `min_mass`.
double truncated_power_pdf(const PowerMixture& m, double x, double t, double min_mass = 1e-300);

// E[P * 1{P <= t}] in closed form (partial lognormal moments per branch).
double truncated_power_mean(const PowerMixture& m, double t);

// Unconditional mean E[P] of the mixture.
double power_mean(const PowerMixture& m);

struct LinkDraw {
  double power = 0.0;
  bool nlos = false;
};

// Samples one received power (branch flip, then lognormal).
LinkDraw draw_received_power(const PowerMixture& m, Rng& rng);

}  // namespace hetnetcov
