#include "choquard/fibering.hpp"

#include "choquard/error.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace choquard {

namespace {

void require_admissible(double p, double q) {
  if (!(q > 1.0 && q < 2.0 && 2.0 * p > 2.0))
    throw DomainError("fibering constants need 1 < q < 2 < 2p");
}

// K(u) = A^{(2p-q)/(2p-2)} / (G B^{(2-q)/(2p-2)}), the part shared by Lambda_n and Lambda_e.
double quotient_kernel(const FiberCoefficients& c) {
  const double e = 2.0 * c.p - 2.0;
  return std::pow(c.A, (2.0 * c.p - c.q) / e) / (c.G * std::pow(c.B, (2.0 - c.q) / e));
}

// Solve f(t) = target on [lo, hi] where f - target changes sign. Bisection on a
// log scale down to 1e-3 relative width, then Newton steps kept inside the
// bracket until |f - target| <= 1e-12 target or the bracket is exhausted.
double bracketed_root(const std::function<double(double)>& f, const std::function<double(double)>& df,
                      double lo, double hi, double target, bool rising) {
  auto below = [&](double t) { return rising ? (f(t) - target < 0.0) : (f(t) - target > 0.0); };

  while (hi / lo > 1.0 + 1e-3) {
    const double mid = std::sqrt(lo * hi);
    (below(mid) ? lo : hi) = mid;
  }

  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 100; ++iter) {
    const double g = f(t) - target;
    if (std::abs(g) <= 1e-12 * std::abs(target))
      break;
    ((rising ? g < 0.0 : g > 0.0) ? lo : hi) = t;
    const double slope = df(t);
    double next = t - g / slope;
    if (!(next > lo && next < hi) || !std::isfinite(next))
      next = 0.5 * (lo + hi);
    if (next == t || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
      break;
    t = next;
  }
  return t;
}

} // namespace

double cpq(double p, double q) {
  require_admissible(p, q);
  return std::pow((2.0 - q) / (2.0 * p - q), (2.0 - q) / (2.0 * p - 2.0)) *
         ((2.0 * p - 2.0) / (2.0 * p - q));
}

double cpq_tilde(double p, double q) {
  require_admissible(p, q);
  return std::pow(p * (2.0 - q) / (2.0 * p - q), (2.0 - q) / (2.0 * p - 2.0)) *
         (q * (p - 1.0) / (2.0 * p - q));
}

double q_n(const FiberCoefficients& c, double t) {
  return (std::pow(t, 2.0 - c.q) * c.A - std::pow(t, 2.0 * c.p - c.q) * c.B) / c.G;
}

double q_e(const FiberCoefficients& c, double t) {
  return (c.q / c.G) *
         (0.5 * std::pow(t, 2.0 - c.q) * c.A - std::pow(t, 2.0 * c.p - c.q) * c.B / (2.0 * c.p));
}

double q_n_prime(const FiberCoefficients& c, double t) {
  return ((2.0 - c.q) * std::pow(t, 1.0 - c.q) * c.A -
          (2.0 * c.p - c.q) * std::pow(t, 2.0 * c.p - c.q - 1.0) * c.B) /
         c.G;
}

double q_e_prime(const FiberCoefficients& c, double t) {
  return (c.q / c.G) * (0.5 * (2.0 - c.q) * std::pow(t, 1.0 - c.q) * c.A -
                        (2.0 * c.p - c.q) / (2.0 * c.p) * std::pow(t, 2.0 * c.p - c.q - 1.0) * c.B);
}

double t_n(const FiberCoefficients& c) {
  return std::pow((2.0 - c.q) / (2.0 * c.p - c.q) * c.A / c.B, 1.0 / (2.0 * c.p - 2.0));
}

double t_e(const FiberCoefficients& c) {
  return std::pow(c.p * (2.0 - c.q) / (2.0 * c.p - c.q) * c.A / c.B, 1.0 / (2.0 * c.p - 2.0));
}

double t_zero(const FiberCoefficients& c) { return std::pow(c.A / c.B, 1.0 / (2.0 * c.p - 2.0)); }

double lambda_n_of(const FiberCoefficients& c) { return cpq(c.p, c.q) * quotient_kernel(c); }

double lambda_e_of(const FiberCoefficients& c) { return cpq_tilde(c.p, c.q) * quotient_kernel(c); }

FiberAnalysis analyze(const FiberCoefficients& c) {
  c.validate();
  FiberAnalysis a;
  a.coef = c;
  a.t_n = t_n(c);
  a.t_e = t_e(c);
  a.lambda_n_u = lambda_n_of(c);
  a.lambda_e_u = lambda_e_of(c);
  return a;
}

NehariRoots nehari_roots(const FiberCoefficients& c, double lambda) {
  c.validate();
  if (!(lambda > 0.0))
    throw DomainError("nehari_roots needs lambda > 0; use t_zero for lambda = 0");
  if (lambda >= lambda_n_of(c))
    throw NoRoots("lambda >= Lambda_n(u): the ray misses N_lambda^+ and N_lambda^-");

  auto f = [&](double t) { return q_n(c, t); };
  auto df = [&](double t) { return q_n_prime(c, t); };
  const double tn = t_n(c);
  // Q_n(t) < t^{2-q} A / G, so Q_n(lo) < lambda and lo < t_n.
  const double lo = std::pow(lambda * c.G / c.A, 1.0 / (2.0 - c.q));

  NehariRoots r;
  r.t_plus = bracketed_root(f, df, lo, tn, lambda, true);
  r.t_minus = bracketed_root(f, df, tn, t_zero(c), lambda, false);
  r.slope_plus = q_n_prime(c, r.t_plus);
  r.slope_minus = q_n_prime(c, r.t_minus);
  return r;
}

EnergyRoots energy_roots(const FiberCoefficients& c, double lambda) {
  c.validate();
  if (!(lambda > 0.0))
    throw DomainError("energy_roots needs lambda > 0");
  if (lambda >= lambda_e_of(c))
    throw NoRoots("lambda >= Lambda_e(u): Q_e(t) = lambda has no solution");

  auto f = [&](double t) { return q_e(c, t); };
  auto df = [&](double t) { return q_e_prime(c, t); };
  const double te = t_e(c);
  const double lo = std::pow(2.0 * lambda * c.G / (c.q * c.A), 1.0 / (2.0 - c.q));
  const double zero = std::pow(c.p * c.A / c.B, 1.0 / (2.0 * c.p - 2.0));

  EnergyRoots r;
  r.t_plus = bracketed_root(f, df, lo, te, lambda, true);
  r.t_minus = bracketed_root(f, df, te, zero, lambda, false);
  return r;
}

std::string_view to_string(BranchTag tag) {
  switch (tag) {
  case BranchTag::N_plus:
    return "N_plus";
  case BranchTag::N_minus:
    return "N_minus";
  case BranchTag::N_zero:
    return "N_zero";
  case BranchTag::off_nehari:
    return "off_nehari";
  }
  return "unknown";
}

BranchTag classify(const FiberCoefficients& c, double lambda, double tol, double zero_band) {
  const double nehari_scale = c.A + c.B + lambda * c.G;
  if (std::abs(nehari_value(c, lambda)) > tol * nehari_scale)
    return BranchTag::off_nehari;
  const double sf = second_form(c, lambda);
  const double sf_scale = c.A + (2.0 * c.p - 1.0) * c.B + lambda * (c.q - 1.0) * c.G;
  if (std::abs(sf) <= zero_band * sf_scale)
    return BranchTag::N_zero;
  return sf > 0.0 ? BranchTag::N_plus : BranchTag::N_minus;
}

} // namespace choquard
