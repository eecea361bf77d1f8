#include "choquard/error.hpp"
#include "choquard/solver.hpp"
#include "flagship.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace choquard;
using fixture::flagship;

namespace {

double x_dist(const Field& a, const Field& b, const Model& m) {
  const Field d = a - b;
  return std::sqrt(l2_inner(m.apply_operator(d), d));
}

// Residual sup over interior nodes, recomputed from the strong form.
double interior_residual(const Solution& s, const Model& m) {
  const Field r = residual(s.u, m.with_lambda(s.lambda));
  double sup = 0.0;
  for (std::size_t i = 1; i + 1 < r.size(); ++i)
    sup = std::max(sup, std::abs(r[i]));
  return sup;
}

void check_solution(const Solution& s, const Model& m, BranchTag branch) {
  const auto& c = s.coef;
  const double lam = s.lambda;
  CHECK(s.converged);
  CHECK(s.branch == branch);
  CHECK(std::abs(c.A - c.B - lam * c.G) <= 1e-8 * (c.A + c.B + lam * c.G));
  const oracle::Triple t{c.A, c.B, c.G, c.p, c.q};
  CHECK(s.energy == doctest::Approx(t.energy(lam)).epsilon(1e-12));
  CHECK(s.second_form_val == doctest::Approx(t.second(lam)).epsilon(1e-12));
  CHECK(interior_residual(s, m) <= 1e-6 * s.residual_scale);
  CHECK(s.relative_residual() <= 1e-6);
  CHECK((branch == BranchTag::N_plus ? s.second_form_val > 0 : s.second_form_val < 0));
  for (std::size_t i = 0; i + 1 < s.u.size(); ++i)
    REQUIRE(s.u[i] > 0.0);
}

} // namespace

TEST_CASE("Nehari projection") {
  const auto& f = flagship();
  const Model m = f.model.with_lambda(0.5 * f.extremal.lambda_n);
  const Field u = seed_profile(m.grid, "gaussian");
  for (auto branch : {BranchTag::N_plus, BranchTag::N_minus}) {
    const Field pu = project_nehari(u, m, branch);
    const auto c = fiber_coefficients(pu, m);
    CHECK(std::abs(directional_derivative(pu, pu, m)) <= 1e-10 * c.scale());
    CHECK(classify(c, m.lambda()) == branch);
    const Field again = project_nehari(pu, m, branch);
    CHECK(again[0] / pu[0] == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK_THROWS_AS(project_nehari(u, m, BranchTag::N_zero), InvalidArgument);

  // lambda = 0: only the N_minus scaling exists.
  const Model m0 = f.model.with_lambda(0.0);
  const Field v = project_nehari(u, m0, BranchTag::N_minus);
  const auto c0 = fiber_coefficients(v, m0);
  CHECK(c0.A == doctest::Approx(c0.B).epsilon(1e-12));
  CHECK_THROWS_AS(project_nehari(u, m0, BranchTag::N_plus), NoRoots);

  // A ray whose quotient lies below lambda cannot be projected.
  const Model high = f.model.with_lambda(1.01 * lambda_n_of(u, f.model));
  CHECK_THROWS_AS(project_nehari(u, high, BranchTag::N_plus), NoRoots);
}

TEST_CASE("two branches at half of lambda_n") {
  const auto& f = flagship();
  const Model m = f.model.with_lambda(0.5 * f.extremal.lambda_n);
  const auto opts = f.cfg.solver_options();
  const auto u = solve_branch_cold(m, BranchTag::N_plus, opts, &f.extremal.minimizer);
  const auto v = solve_branch_cold(m, BranchTag::N_minus, opts, &f.extremal.minimizer);
  check_solution(u, m, BranchTag::N_plus);
  check_solution(v, m, BranchTag::N_minus);
  CHECK(u.energy < 0.0);
  CHECK(u.energy < v.energy);
  CHECK(x_dist(u.u, v.u, m) > 0.1 * v.norm());

  // Coercivity: both stay inside the a priori ball for their energy level.
  CHECK(u.coef.A <= coercivity_bound(m.params, u.energy));
  CHECK(v.coef.A <= coercivity_bound(m.params, v.energy));

  // Any seed on the same branch reaches the same minimizer.
  const auto u2 = solve_branch(m, BranchTag::N_plus, seed_profile(m.grid, "wide_gaussian"), opts);
  CHECK(u2.energy == doctest::Approx(u.energy).epsilon(1e-8));
}

TEST_CASE("small lambda: u shrinks, v tends to v_0") {
  const auto& f = flagship();
  const auto opts = f.cfg.solver_options();
  const auto v0 = solve_lambda_zero(f.model, opts, &f.extremal.minimizer);
  CHECK(v0.converged);
  CHECK(v0.second_form_val < 0.0);
  CHECK(interior_residual(v0, f.model) <= 1e-6 * v0.residual_scale);
  CHECK(v0.branch == BranchTag::N_minus);
  CHECK(v0.norm() > 0.0);

  std::vector<double> norms, e1, dist;
  for (double frac : {0.2, 0.1, 0.05}) {
    const Model m = f.model.with_lambda(frac * f.extremal.lambda_n);
    const auto u = solve_branch_cold(m, BranchTag::N_plus, opts, &f.extremal.minimizer);
    const auto v = solve_branch(m, BranchTag::N_minus, v0.u, opts);
    norms.push_back(u.norm());
    e1.push_back(u.energy);
    dist.push_back(x_dist(v.u, v0.u, m));
  }
  for (std::size_t i = 0; i < norms.size(); ++i) {
    CHECK(e1[i] < 0.0);
    if (i > 0) {
      CHECK(norms[i] < norms[i - 1]);
      CHECK(e1[i] > e1[i - 1]);
      CHECK(dist[i] < dist[i - 1]);
    }
  }

  const Model tiny = f.model.with_lambda(1e-3 * f.extremal.lambda_n);
  const auto v_tiny = solve_branch(tiny, BranchTag::N_minus, v0.u, opts);
  // dE/dlambda = -G/q along the branch, so the first-order prediction from v_0 is sharp.
  const double slope = v0.coef.G / v0.coef.q;
  const double shift = tiny.lambda() * slope;
  CHECK(std::abs(v_tiny.energy - (v0.energy - shift)) <= 0.05 * shift);
}

TEST_CASE("sweep") {
  const auto& f = flagship();
  const auto opts = f.cfg.solver_options();
  const double ln = f.extremal.lambda_n, le = f.extremal.lambda_e;
  CHECK_THROWS_AS(sweep(f.model, {0.5, 0.4}, opts), InvalidArgument);
  CHECK_THROWS_AS(sweep(f.model, {0.0, 0.4}, opts), InvalidArgument);

  std::vector<double> lambdas;
  for (double frac : {0.2, 0.4, 0.6, 0.8, 0.86, 0.92, 0.97})
    lambdas.push_back(frac * ln);
  const auto d = sweep(f.model, lambdas, opts, &f.extremal.minimizer);
  REQUIRE(d.all_ok());
  int changes = 0;
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const auto& r = d.rows[i];
    CHECK(r.e1() < 0.0);
    CHECK(r.e1() < r.e2());
    CHECK(r.u->branch == BranchTag::N_plus);
    CHECK(r.v->branch == BranchTag::N_minus);
    CHECK(r.sign_e2() == (r.lambda < le ? 1 : -1));
    if (i > 0) {
      CHECK(r.e1() < d.rows[i - 1].e1());
      CHECK(r.e2() < d.rows[i - 1].e2());
      changes += r.sign_e2() != d.rows[i - 1].sign_e2();
    }
  }
  CHECK(changes == 1);

  // Cold rows in parallel land on the same solutions.
  SolverOptions cold = opts;
  cold.warm_start = false;
  const auto dc = sweep(f.model, {lambdas[1], lambdas[4]}, cold, &f.extremal.minimizer);
  REQUIRE(dc.all_ok());
  CHECK(dc.rows[0].e1() == doctest::Approx(d.rows[1].e1()).epsilon(1e-7));
  CHECK(dc.rows[1].e2() == doctest::Approx(d.rows[4].e2()).epsilon(1e-7));

  DiagramRow empty;
  CHECK_FALSE(empty.ok());
  CHECK(std::isnan(empty.e1()));
}

TEST_CASE("limit to lambda_n") {
  const auto& f = flagship();
  const auto lim = limit_to_lambda_n(f.model, f.extremal, f.cfg.solver_options());
  CHECK(lim.u.lambda == f.extremal.lambda_n);
  CHECK(lim.v.lambda == f.extremal.lambda_n);
  CHECK(lim.u.branch == BranchTag::N_plus);
  CHECK(lim.v.branch == BranchTag::N_minus);
  CHECK(lim.u.energy < lim.v.energy);
  CHECK(lim.v.energy < 0.0);
  CHECK(lim.path_u.size() == 9);

  // Steps between consecutive lambda_j shrink once the sequence settles.
  std::vector<double> du;
  for (std::size_t j = 1; j + 1 < lim.path_u.size(); ++j)
    du.push_back(x_dist(lim.path_u[j].u, lim.path_u[j - 1].u, f.model));
  for (std::size_t j = 3; j < du.size(); ++j)
    CHECK(du[j] < du[j - 1]);

  for (const auto* s : {&lim.u, &lim.v}) {
    const double mass = lq_norm_pow(s->u, 2.0);
    CHECK(std::abs(farfield_ratio(*f.model.riesz, s->u, 2.0, 18.0) / mass - 1.0) <= 0.1);
  }
}

TEST_CASE("embedding-based bounds") {
  const auto& f = flagship();
  CHECK(lambda_n_lower_bound(f.model.params) > 0.0);
  const ProblemParams p = f.model.with_lambda(1.0).params;
  CHECK(coercivity_bound(p, 0.0) > 0.0);
  CHECK(coercivity_bound(p, 1.0) > coercivity_bound(p, 0.0));
  // At the bound, (p-1)/(2p) A - lambda c2 (1/q - 1/(2p)) A^{q/2} equals the cap.
  const auto k = embedding_constants(p);
  const double a = coercivity_bound(p, 2.0);
  CHECK(0.25 * a - k.c2 * (1 / 1.5 - 0.25) * std::pow(a, 0.75) == doctest::Approx(2.0).epsilon(1e-10));
}
