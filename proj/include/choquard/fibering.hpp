#pragma once

// Scalar algebra of the fibering maps t -> E_lambda(t u). Every quantity here
// is a closed-form function of the coefficient triple (A, B, G) of u:
//
//   Q_n(t) = (t^{2-q} A - t^{2p-q} B) / G              (t u on the Nehari set iff Q_n(t) = lambda)
//   Q_e(t) = (q / G) (t^{2-q} A / 2 - t^{2p-q} B / 2p) (E_lambda(t u) = 0 iff Q_e(t) = lambda)
//
// Q_n and Q_e each have a single interior maximum, at t_n and t_e, with
// values Lambda_n(u) = C_{p,q} K(u) and Lambda_e(u) = C~_{p,q} K(u).

#include "choquard/functional.hpp"

#include <string_view>

namespace choquard {

double cpq(double p, double q);
double cpq_tilde(double p, double q);

double q_n(const FiberCoefficients& c, double t);
double q_e(const FiberCoefficients& c, double t);
double q_n_prime(const FiberCoefficients& c, double t);
double q_e_prime(const FiberCoefficients& c, double t);

double t_n(const FiberCoefficients& c);
double t_e(const FiberCoefficients& c);
// Positive zero of Q_n, (A/B)^{1/(2p-2)}; the only Nehari scaling when lambda = 0.
double t_zero(const FiberCoefficients& c);

// Lambda_n(u) = Q_n(t_n), Lambda_e(u) = Q_e(t_e), both 0-homogeneous in u.
double lambda_n_of(const FiberCoefficients& c);
double lambda_e_of(const FiberCoefficients& c);

struct FiberAnalysis {
  FiberCoefficients coef;
  double t_n = 0.0;
  double t_e = 0.0;
  double lambda_n_u = 0.0;
  double lambda_e_u = 0.0;
};

FiberAnalysis analyze(const FiberCoefficients& c);

struct NehariRoots {
  double t_plus = 0.0;
  double t_minus = 0.0;
  double slope_plus = 0.0;  // Q_n'(t_plus) > 0
  double slope_minus = 0.0; // Q_n'(t_minus) < 0
};

// Both solutions of Q_n(t) = lambda for 0 < lambda < Lambda_n(c).
// Throws NoRoots when lambda >= Lambda_n(c).
NehariRoots nehari_roots(const FiberCoefficients& c, double lambda);

struct EnergyRoots {
  double t_plus = 0.0;
  double t_minus = 0.0;
};

// Both solutions of Q_e(t) = lambda for 0 < lambda < Lambda_e(c).
EnergyRoots energy_roots(const FiberCoefficients& c, double lambda);

enum class BranchTag { N_plus, N_minus, N_zero, off_nehari };

std::string_view to_string(BranchTag tag);

// off_nehari when |A - B - lambda G| > tol (A + B + lambda G); otherwise the
// sign of E''(u)(u,u) decides, with a relative band of zero_band around 0.
BranchTag classify(const FiberCoefficients& c, double lambda, double tol = 1e-8,
                   double zero_band = 1e-8);

} // namespace choquard
