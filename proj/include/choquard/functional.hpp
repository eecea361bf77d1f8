#pragma once

#include "choquard/grid.hpp"
#include "choquard/riesz.hpp"

#include <memory>

namespace choquard {

struct ProblemParams {
  int dimension = 3;
  double alpha = 2.0;
  double p = 2.0;
  double q = 1.5;
  PotentialSpec pot;
  double lambda = 0.0;

  // (N + alpha) / N and (N + alpha) / (N - 2).
  double p_lower() const { return (dimension + alpha) / dimension; }
  double p_upper() const { return (dimension + alpha) / (dimension - 2.0); }

  void validate() const;
};

// (A, B, G) = (||u||^2, int (I_alpha*|u|^p)|u|^p, ||u||_q^q) with the exponents.
struct FiberCoefficients {
  double A = 0.0;
  double B = 0.0;
  double G = 0.0;
  double p = 2.0;
  double q = 1.5;

  // Coefficients of t*u.
  FiberCoefficients scaled(double t) const;
  double scale() const { return A + B + G; }
  void validate() const;
};

// Everything needed to evaluate E_lambda on one grid. The Riesz operator and
// the operator matrix are shared between copies.
struct Model {
  GridPtr grid;
  std::shared_ptr<const RieszOperator> riesz;
  std::shared_ptr<const Tridiagonal> op_matrix;
  ProblemParams params;

  static Model build(GridPtr grid, const ProblemParams& params);
  static Model build(GridPtr grid, const ProblemParams& params, RieszBackend backend);
  Model with_lambda(double lambda) const;
  double lambda() const { return params.lambda; }

  Field apply_operator(const Field& u) const;
  // Solves (-Delta + V) x = rhs on the grid.
  Field solve_operator(const Field& rhs) const;
};

FiberCoefficients fiber_coefficients(const Field& u, const Model& model);

double energy(const FiberCoefficients& c, double lambda);
// A - B - lambda G = E'(u)u.
double nehari_value(const FiberCoefficients& c, double lambda);
// A - (2p-1) B - lambda (q-1) G = E''(u)(u,u).
double second_form(const FiberCoefficients& c, double lambda);

double energy(const Field& u, const Model& model);
double directional_derivative(const Field& u, const Field& w, const Model& model);
double second_form(const Field& u, const Model& model);

// Node-wise |u|^{q-2} u with the value 0 where u = 0.
Field sublinear_term(const Field& u, double q);

// -Delta u + V u - (I_alpha*|u|^p)|u|^{p-2}u - lambda |u|^{q-2}u, the L^2 gradient of E_lambda.
Field residual(const Field& u, const Model& model);

// Derivative of residual() at u applied to v.
Field residual_derivative(const Field& u, const Field& v, const Model& model);

// sup-norm magnitude of the three terms of residual(), used to make
// residual tolerances relative.
double residual_scale(const Field& u, const Model& model);

} // namespace choquard
