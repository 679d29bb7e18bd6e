#include "hetnetcov/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hetnetcov/errors.hpp"

namespace hetnetcov {

namespace {

// Standard normal CDF via erfc, accurate deep into both tails.
double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double norm_pdf(double z) {
  static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

// Per-branch CDF at x of lognormal(mu, sigma); sigma == 0 is a unit step at
// the deterministic power e^mu.
double branch_cdf(double lnx, double mu, double sigma) {
  if (sigma == 0.0) return lnx >= mu ? 1.0 : 0.0;
  return norm_cdf((lnx - mu) / sigma);
}

// E[e^Y 1{Y <= ln t}] for Y ~ N(mu, sigma^2).
double branch_partial_mean(double lnt, double mu, double sigma) {
  if (sigma == 0.0) return mu <= lnt ? std::exp(mu) : 0.0;
  return std::exp(mu + 0.5 * sigma * sigma) * norm_cdf((lnt - mu - sigma * sigma) / sigma);
}

}  // namespace

double nlos_probability(double r, double kappa_per_m) {
  if (!(r >= 0.0)) throw ValidationError("nlos_probability: r must be >= 0");
  return -std::expm1(-kappa_per_m * r);
}

PowerMixture link_power_law(const LinearTierParams& tier, double r, double kappa_per_m) {
  if (!(r > 0.0)) throw ValidationError("link_power_law: r must be > 0");
  PowerMixture m;
  m.p_nlos = nlos_probability(r, kappa_per_m);
  const double lnr = std::log(r);
  m.mu_nlos = std::log(tier.b_nlos) - tier.exponent_nlos * lnr;
  m.mu_los = std::log(tier.b_los) - tier.exponent_los * lnr;
  m.sigma_nlos = tier.sigma_s_nlos;
  m.sigma_los = tier.sigma_s_los;
  return m;
}

double power_cdf(const PowerMixture& m, double x) {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double lnx = std::log(x);
  double cdf = 0.0;
  if (m.p_nlos > 0.0) cdf += m.p_nlos * branch_cdf(lnx, m.mu_nlos, m.sigma_nlos);
  const double pl = m.p_los();
  if (pl > 0.0) cdf += pl * branch_cdf(lnx, m.mu_los, m.sigma_los);
  return std::min(cdf, 1.0);
}

double power_pdf(const PowerMixture& m, double x) {
  if ((m.p_nlos > 0.0 && m.sigma_nlos == 0.0) || (m.p_los() > 0.0 && m.sigma_los == 0.0))
    throw DegenerateSigmaError("mixture has an atom (sigma == 0 branch); density undefined");
  if (!(x > 0.0)) return 0.0;
  const double lnx = std::log(x);
  double pdf = 0.0;
  if (m.p_nlos > 0.0) pdf += m.p_nlos * norm_pdf((lnx - m.mu_nlos) / m.sigma_nlos) / (m.sigma_nlos * x);
  const double pl = m.p_los();
  if (pl > 0.0) pdf += pl * norm_pdf((lnx - m.mu_los) / m.sigma_los) / (m.sigma_los * x);
  return pdf;
}

double truncated_power_pdf(const PowerMixture& m, double x, double t, double min_mass) {
  if (!(t > 0.0)) throw ZeroMassError("truncation level t must be > 0");
  const double mass = power_cdf(m, t);
  if (mass < min_mass)
    throw ZeroMassError("P(P <= t) = " + std::to_string(mass) + " too small to condition on");
  if (!(x > 0.0) || x > t) return 0.0;
  return power_pdf(m, x) / mass;
}

double truncated_power_mean(const PowerMixture& m, double t) {
  if (!(t > 0.0)) return 0.0;
  const double lnt = std::log(t);
  double mean = 0.0;
  if (m.p_nlos > 0.0) mean += m.p_nlos * branch_partial_mean(lnt, m.mu_nlos, m.sigma_nlos);
  const double pl = m.p_los();
  if (pl > 0.0) mean += pl * branch_partial_mean(lnt, m.mu_los, m.sigma_los);
  return mean;
}

double power_mean(const PowerMixture& m) {
  double mean = 0.0;
  if (m.p_nlos > 0.0) mean += m.p_nlos * std::exp(m.mu_nlos + 0.5 * m.sigma_nlos * m.sigma_nlos);
  const double pl = m.p_los();
  if (pl > 0.0) mean += pl * std::exp(m.mu_los + 0.5 * m.sigma_los * m.sigma_los);
  return mean;
}

LinkDraw draw_received_power(const PowerMixture& m, Rng& rng) {
  LinkDraw d;
  d.nlos = rng.bernoulli(m.p_nlos);
  const double mu = d.nlos ? m.mu_nlos : m.mu_los;
  const double sigma = d.nlos ? m.sigma_nlos : m.sigma_los;
  d.power = std::exp(mu + sigma * rng.normal());
  return d;
}

}  // namespace hetnetcov
