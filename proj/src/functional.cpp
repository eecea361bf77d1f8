#include "choquard/functional.hpp"

#include "choquard/error.hpp"

#include <algorithm>
#include <cmath>

namespace choquard {

void ProblemParams::validate() const {
  if (dimension < 3)
    throw InvalidArgument("dimension must be >= 3");
  if (!(alpha > 0.0 && alpha < dimension))
    throw InvalidArgument("alpha must lie in (0, N)");
  if (!(p > p_lower() && p < p_upper()))
    throw InvalidArgument("p must lie in ((N+alpha)/N, (N+alpha)/(N-2))");
  if (!(q > 1.0 && q < 2.0))
    throw InvalidArgument("q must lie in (1, 2)");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("lambda must be >= 0");
  pot.validate(dimension);
}

FiberCoefficients FiberCoefficients::scaled(double t) const {
  FiberCoefficients c = *this;
  c.A = t * t * A;
  c.B = std::pow(t, 2.0 * p) * B;
  c.G = std::pow(t, q) * G;
  return c;
}

void FiberCoefficients::validate() const {
  if (!(A > 0.0 && B > 0.0 && G > 0.0) || !std::isfinite(A) || !std::isfinite(B) ||
      !std::isfinite(G))
    throw ZeroField();
  if (!(q > 1.0 && q < 2.0 && p > 1.0))
    throw DomainError("fiber coefficients need 1 < q < 2 < 2p");
}

Model Model::build(GridPtr grid, const ProblemParams& params) {
  const bool newtonian = grid->dimension() == 3 && params.alpha == 2.0;
  return build(std::move(grid), params,
               newtonian ? RieszBackend::newtonian_exact : RieszBackend::dense_kernel);
}

Model Model::build(GridPtr grid, const ProblemParams& params, RieszBackend backend) {
  params.validate();
  if (grid->dimension() != params.dimension)
    throw InvalidArgument("grid dimension differs from problem dimension");
  Model m;
  m.grid = grid;
  m.params = params;
  m.riesz = std::make_shared<const RieszOperator>(grid, params.alpha, backend);
  m.op_matrix = std::make_shared<const Tridiagonal>(operator_matrix(*grid, params.pot));
  return m;
}

Model Model::with_lambda(double lambda) const {
  Model m = *this;
  m.params.lambda = lambda;
  m.params.validate();
  return m;
}

Field Model::apply_operator(const Field& u) const {
  if (u.grid() != grid)
    throw GridMismatch();
  return Field(grid, op_matrix->apply(u.values()));
}

Field Model::solve_operator(const Field& rhs) const {
  if (rhs.grid() != grid)
    throw GridMismatch();
  return Field(grid, op_matrix->solve(rhs.values()));
}

FiberCoefficients fiber_coefficients(const Field& u, const Model& model) {
  if (u.grid() != model.grid)
    throw GridMismatch();
  if (!(u.sup_norm() > 1e-14))
    throw ZeroField();
  FiberCoefficients c;
  c.p = model.params.p;
  c.q = model.params.q;
  c.A = l2_inner(model.apply_operator(u), u);
  c.B = choquard_energy(*model.riesz, u, c.p);
  c.G = lq_norm_pow(u, c.q);
  c.validate();
  return c;
}

double energy(const FiberCoefficients& c, double lambda) {
  return 0.5 * c.A - c.B / (2.0 * c.p) - lambda * c.G / c.q;
}

double nehari_value(const FiberCoefficients& c, double lambda) { return c.A - c.B - lambda * c.G; }

double second_form(const FiberCoefficients& c, double lambda) {
  return c.A - (2.0 * c.p - 1.0) * c.B - lambda * (c.q - 1.0) * c.G;
}

double energy(const Field& u, const Model& model) {
  if (u.grid() != model.grid)
    throw GridMismatch();
  const auto& prm = model.params;
  const double a = l2_inner(model.apply_operator(u), u);
  const double b = choquard_energy(*model.riesz, u, prm.p);
  const double g = lq_norm_pow(u, prm.q);
  return 0.5 * a - b / (2.0 * prm.p) - prm.lambda * g / prm.q;
}

double directional_derivative(const Field& u, const Field& w, const Model& model) {
  return l2_inner(residual(u, model), w);
}

double second_form(const Field& u, const Model& model) {
  return second_form(fiber_coefficients(u, model), model.lambda());
}

Field sublinear_term(const Field& u, double q) {
  Field out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] != 0.0)
      out[i] = std::copysign(std::pow(std::abs(u[i]), q - 1.0), u[i]);
  }
  return out;
}

Field residual(const Field& u, const Model& model) {
  const auto& prm = model.params;
  Field r = model.apply_operator(u);
  r -= choquard_force(*model.riesz, u, prm.p);
  if (prm.lambda != 0.0)
    r -= prm.lambda * sublinear_term(u, prm.q);
  return r;
}

Field residual_derivative(const Field& u, const Field& v, const Model& model) {
  const auto& prm = model.params;
  Field out = model.apply_operator(v);
  out -= choquard_force_derivative(*model.riesz, u, v, prm.p);
  if (prm.lambda != 0.0) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] != 0.0)
        out[i] -= prm.lambda * (prm.q - 1.0) * std::pow(std::abs(u[i]), prm.q - 2.0) * v[i];
    }
  }
  return out;
}

double residual_scale(const Field& u, const Model& model) {
  const auto& prm = model.params;
  const double lin = model.apply_operator(u).sup_norm();
  const double nonlocal = choquard_force(*model.riesz, u, prm.p).sup_norm();
  const double sub = prm.lambda * sublinear_term(u, prm.q).sup_norm();
  return std::max({lin, nonlocal, sub});
}

} // namespace choquard
