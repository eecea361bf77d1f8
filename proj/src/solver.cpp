#include "choquard/solver.hpp"

#include "choquard/error.hpp"
#include "choquard/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>

namespace choquard {

namespace {

double sup_residual(const Field& r) { return r.sup_norm(); }

Solution finish(const Field& u, const Model& model, BranchTag requested, int iterations) {
  Solution s;
  s.u = u;
  s.lambda = model.lambda();
  s.requested = requested;
  s.coef = fiber_coefficients(u, model);
  s.energy = energy(s.coef, s.lambda);
  s.second_form_val = second_form(s.coef, s.lambda);
  s.branch = classify(s.coef, s.lambda);
  s.residual_sup = sup_residual(residual(u, model));
  s.residual_scale = residual_scale(u, model);
  s.iterations = iterations;
  return s;
}

// Largest step in (0, 1] keeping every node strictly positive, when u is.
double positive_step(const Field& u, const Field& du) {
  double alpha = 1.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] <= 0.0)
      return 1.0;
    if (du[i] < 0.0)
      alpha = std::min(alpha, -0.95 * u[i] / du[i]);
  }
  return alpha;
}

// -Delta + V - lambda (q-1)|u|^{q-2}, with the local term capped at 0.9 V so the
// matrix stays an M-matrix; only the nonlocal part is left to GMRES.
Tridiagonal local_jacobian(const Model& model, const Field& u) {
  Tridiagonal t = *model.op_matrix;
  const auto& prm = model.params;
  if (prm.lambda == 0.0)
    return t;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0.0)
      continue;
    const double v = prm.pot(model.grid->node(i));
    const double d = prm.lambda * (prm.q - 1.0) * std::pow(std::abs(u[i]), prm.q - 2.0);
    t.diag[i] -= std::min(d, 0.9 * v);
  }
  return t;
}

// Newton-GMRES on residual(u) = 0 with backtracking on the weighted L^2 norm of the residual.
bool newton_polish(const Model& model, Field& u, double tol, int& iterations) {
  const auto weights = model.grid->weights();
  Field r = residual(u, model);
  double merit = std::sqrt(l2_inner(r, r));
  for (int step = 0; step < 40; ++step) {
    if (sup_residual(r) <= tol * residual_scale(u, model))
      return true;
    LinearMap jac = [&](std::span<const double> x) {
      Field v(model.grid, std::vector<double>(x.begin(), x.end()));
      const Field jv = residual_derivative(u, v, model);
      return std::vector<double>(jv.values().begin(), jv.values().end());
    };
    const Tridiagonal pre = local_jacobian(model, u);
    LinearMap precond = [&](std::span<const double> x) { return pre.solve(x); };
    std::vector<double> rhs(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
      rhs[i] = -r[i];
    const auto sol = gmres(jac, precond, rhs, weights, 1e-11, 50, 150);
    const Field du(model.grid, sol.x);

    double alpha = positive_step(u, du);
    bool improved = false;
    for (int tries = 0; tries < 30; ++tries) {
      Field cand = u + alpha * du;
      Field rc = residual(cand, model);
      const double mc = std::sqrt(l2_inner(rc, rc));
      if (std::isfinite(mc) && mc < (1.0 - 1e-4 * alpha) * merit) {
        u = std::move(cand);
        r = std::move(rc);
        merit = mc;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    ++iterations;
    // A strongly damped step means u is outside Newton's basin (typically
    // tails far below the sublinear balance); hand back to descent.
    if (!improved || alpha < 1e-3)
      return sup_residual(r) <= tol * residual_scale(u, model);
  }
  return sup_residual(r) <= tol * residual_scale(u, model);
}

Field on_grid(const Field& seed, const Model& model) {
  return seed.grid() == model.grid ? seed : resample(seed, model.grid);
}

double x_distance(const Field& a, const Field& b, const Model& model) {
  const Field d = a - b;
  return std::sqrt(l2_inner(model.apply_operator(d), d));
}

} // namespace

double Solution::norm() const { return std::sqrt(coef.A); }

Field project_nehari(const Field& u, const Model& model, BranchTag branch) {
  if (branch != BranchTag::N_plus && branch != BranchTag::N_minus)
    throw InvalidArgument("projection needs branch N_plus or N_minus");
  const auto c = fiber_coefficients(u, model);
  const double lambda = model.lambda();
  if (lambda == 0.0) {
    if (branch == BranchTag::N_plus)
      throw NoRoots("N_plus is empty when lambda = 0");
    return t_zero(c) * u;
  }
  const auto roots = nehari_roots(c, lambda);
  return (branch == BranchTag::N_plus ? roots.t_plus : roots.t_minus) * u;
}

Solution solve_branch(const Model& model, BranchTag branch, const Field& seed, const SolverOptions& opts) {
  const double lambda = model.lambda();
  Field u = project_nehari(on_grid(seed, model), model, branch);

  auto c = fiber_coefficients(u, model);
  double e = energy(c, lambda);
  const double a_cap = coercivity_bound(model.params, e);
  int iterations = 0;
  double tau = opts.step0;

  // Descent to the handover level, then Newton; a failed polish resumes
  // descent with a tighter handover.
  double handover = std::max(opts.newton_switch, opts.tol_residual);
  bool polished = false;
  while (!polished) {
    bool stalled = false;
    for (; iterations < opts.max_iters; ++iterations) {
      const Field r = residual(u, model);
      if (sup_residual(r) <= handover * residual_scale(u, model))
        break;
      const Field g = model.solve_operator(r);
      const double slope = l2_inner(r, g);

      bool accepted = false;
      for (int tries = 0; tries < 50; ++tries) {
        try {
          Field cand = project_nehari(u - tau * g, model, branch);
          const auto cc = fiber_coefficients(cand, model);
          const double ec = energy(cc, lambda);
          if (ec <= e - 1e-4 * tau * slope) {
            u = std::move(cand);
            c = cc;
            e = ec;
            accepted = true;
            break;
          }
        } catch (const NoRoots&) {
        } catch (const ZeroField&) {
        }
        tau *= 0.5;
      }
      if (!accepted) {
        stalled = true;
        break;
      }
      if (c.A > a_cap * (1.0 + 1e-9))
        throw InvariantViolation("descent iterate left the coercivity ball");
      tau = std::min(2.0 * tau, opts.step0);
    }

    Field trial = u;
    polished = newton_polish(model, trial, opts.tol_residual, iterations);
    if (polished) {
      u = std::move(trial);
      break;
    }
    if (stalled || iterations >= opts.max_iters || handover <= opts.tol_residual)
      throw NonConvergence("branch solve did not reach the residual tolerance");
    handover = std::max(0.01 * handover, opts.tol_residual);
  }

  if (*std::min_element(u.values().begin(), u.values().end()) < 0.0) {
    u = abs(u);
    if (!newton_polish(model, u, opts.tol_residual, iterations))
      throw NonConvergence("re-polish after the positivity fix did not converge");
  }

  Solution s = finish(u, model, branch, iterations);
  s.converged = true;
  if (s.branch != branch)
    throw NonConvergence("solve converged off the requested Nehari component (" +
                         std::string(to_string(s.branch)) + ")");
  return s;
}

Solution solve_branch_cold(const Model& model, BranchTag branch, const SolverOptions& opts,
                           const Field* extremal_minimizer) {
  std::vector<Field> seeds;
  if (extremal_minimizer)
    seeds.push_back(on_grid(*extremal_minimizer, model));
  const auto& names = seed_profile_names();
  const std::size_t extra = std::clamp<std::size_t>(opts.multistarts, 1, names.size());
  for (std::size_t k = 0; k < extra; ++k)
    seeds.push_back(seed_profile(model.grid, names[k]));

  std::optional<Solution> best;
  std::string last_error = "no seed available";
  for (const auto& seed : seeds) {
    try {
      Solution s = solve_branch(model, branch, seed, opts);
      if (!best || s.energy < best->energy)
        best = std::move(s);
    } catch (const NonConvergence& e) {
      last_error = e.what();
    } catch (const NoRoots& e) {
      last_error = e.what();
    }
  }
  if (!best)
    throw NonConvergence("cold start failed from every seed: " + last_error);
  return *best;
}

double DiagramRow::e1() const { return u ? u->energy : std::numeric_limits<double>::quiet_NaN(); }
double DiagramRow::e2() const { return v ? v->energy : std::numeric_limits<double>::quiet_NaN(); }

int DiagramRow::sign_e2() const {
  if (!v)
    return 0;
  const double scale = v->coef.scale();
  if (std::abs(v->energy) <= 1e-6 * scale)
    return 0;
  return v->energy > 0.0 ? 1 : -1;
}

bool BranchDiagram::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const DiagramRow& r) { return r.ok(); });
}

namespace {

// Warm-started solve at `target` from a solution at `from`; on failure the gap
// is bridged through midpoints, down to a few halvings.
std::optional<Solution> continue_branch(const Model& base, BranchTag branch, const Solution& from, double target,
                                        const SolverOptions& opts, int depth = 0) {
  const Model model = base.with_lambda(target);
  try {
    return solve_branch(model, branch, from.u, opts);
  } catch (const NonConvergence&) {
  } catch (const NoRoots&) {
  }
  if (depth >= 6)
    return std::nullopt;
  const double mid = 0.5 * (from.lambda + target);
  auto half = continue_branch(base, branch, from, mid, opts, depth + 1);
  if (!half)
    return std::nullopt;
  return continue_branch(base, branch, *half, target, opts, depth + 1);
}

std::optional<Solution> try_cold(const Model& model, BranchTag branch, const SolverOptions& opts,
                                 const Field* minimizer) {
  try {
    return solve_branch_cold(model, branch, opts, minimizer);
  } catch (const NonConvergence&) {
    return std::nullopt;
  }
}

} // namespace

BranchDiagram sweep(const Model& model, const std::vector<double>& lambdas, const SolverOptions& opts,
                    const Field* extremal_minimizer) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0))
      throw InvalidArgument("sweep lambdas must be positive");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1]))
      throw InvalidArgument("sweep lambdas must be strictly increasing");
  }

  BranchDiagram diagram;
  diagram.rows.resize(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    diagram.rows[i].lambda = lambdas[i];

  if (!opts.warm_start) {
    std::vector<std::future<void>> jobs;
    for (auto& row : diagram.rows) {
      jobs.push_back(std::async(std::launch::async, [&] {
        const Model m = model.with_lambda(row.lambda);
        row.u = try_cold(m, BranchTag::N_plus, opts, extremal_minimizer);
        row.v = try_cold(m, BranchTag::N_minus, opts, extremal_minimizer);
      }));
    }
    for (auto& j : jobs)
      j.get();
    return diagram;
  }

  std::optional<Solution> prev_u, prev_v;
  for (auto& row : diagram.rows) {
    const Model m = model.with_lambda(row.lambda);
    if (prev_u)
      row.u = continue_branch(model, BranchTag::N_plus, *prev_u, row.lambda, opts);
    if (!row.u)
      row.u = try_cold(m, BranchTag::N_plus, opts, extremal_minimizer);
    if (prev_v)
      row.v = continue_branch(model, BranchTag::N_minus, *prev_v, row.lambda, opts);
    if (!row.v)
      row.v = try_cold(m, BranchTag::N_minus, opts, extremal_minimizer);
    if (row.u)
      prev_u = row.u;
    if (row.v)
      prev_v = row.v;
  }
  return diagram;
}

LimitResult limit_to_lambda_n(const Model& model, const ExtremalResult& extremal, const SolverOptions& opts,
                              int steps) {
  if (steps < 1)
    throw InvalidArgument("limit_to_lambda_n needs at least one step");
  const double lambda_n = extremal.lambda_n;
  LimitResult out;

  const Model first = model.with_lambda(0.5 * lambda_n);
  Solution u = solve_branch_cold(first, BranchTag::N_plus, opts, &extremal.minimizer);
  Solution v = solve_branch_cold(first, BranchTag::N_minus, opts, &extremal.minimizer);
  out.path_u.push_back(u);
  out.path_v.push_back(v);

  for (int j = 2; j <= steps + 1; ++j) {
    const double lambda = j <= steps ? (1.0 - std::ldexp(1.0, -j)) * lambda_n : lambda_n;
    auto nu = continue_branch(model, BranchTag::N_plus, u, lambda, opts);
    auto nv = continue_branch(model, BranchTag::N_minus, v, lambda, opts);
    if (!nu || !nv)
      throw NonConvergence("continuation toward lambda_n failed at lambda = " + std::to_string(lambda));
    u = *nu;
    v = *nv;
    out.path_u.push_back(u);
    out.path_v.push_back(v);
  }

  if (u.branch == BranchTag::N_zero || v.branch == BranchTag::N_zero)
    throw InvariantViolation("solution at lambda_n lies on N_zero");
  if (!(u.energy < v.energy))
    throw InvariantViolation("E1 < E2 fails at lambda_n");
  if (x_distance(u.u, v.u, model) <= 1e-6 * v.norm())
    throw InvariantViolation("the two branches merged at lambda_n");
  out.u = u;
  out.v = v;
  return out;
}

Solution solve_lambda_zero(const Model& model, const SolverOptions& opts, const Field* seed) {
  const Model m = model.with_lambda(0.0);
  if (seed)
    return solve_branch(m, BranchTag::N_minus, *seed, opts);
  return solve_branch_cold(m, BranchTag::N_minus, opts);
}

EmbeddingConstants embedding_constants(const ProblemParams& params) {
  params.validate();
  const int n = params.dimension;
  const double alpha = params.alpha, p = params.p, q = params.q;
  const double v0 = params.pot.v0, s = params.pot.growth_exponent;
  constexpr double pi = std::numbers::pi;

  // ||u||_{2N p/(N+alpha)} between L^2 (A >= v0 ||u||_2^2) and L^{2*} (A >= S ||u||_{2*}^2).
  const double sobolev = pi * n * (n - 2.0) * std::pow(std::tgamma(0.5 * n) / std::tgamma(n), 2.0 / n);
  const double r = 2.0 * n * p / (n + alpha);
  const double two_star = 2.0 * n / (n - 2.0);
  const double theta = (1.0 / r - 1.0 / two_star) / (0.5 - 1.0 / two_star);
  EmbeddingConstants k;
  k.c1 = riesz_constant(n, alpha) * hls_lieb_constant(n, alpha) * std::pow(v0, -theta * p) *
         std::pow(sobolev, -(1.0 - theta) * p);

  // int V^{-e}, e = q/(2-q), in closed form after rho = r^s / v0.
  const double e = q / (2.0 - q);
  const double a = static_cast<double>(n) / s;
  const double integral = unit_sphere_area(n) / s * std::pow(v0, a - e) * std::tgamma(a) * std::tgamma(e - a) /
                          std::tgamma(e);
  k.c2 = std::pow(integral, 0.5 * (2.0 - q));
  return k;
}

double lambda_n_lower_bound(const ProblemParams& params) {
  const auto k = embedding_constants(params);
  const double b = (2.0 - params.q) / (2.0 * params.p - 2.0);
  return cpq(params.p, params.q) / (k.c2 * std::pow(k.c1, b));
}

double coercivity_bound(const ProblemParams& params, double energy_cap) {
  const auto k = embedding_constants(params);
  const double p = params.p, q = params.q;
  const double a = (p - 1.0) / (2.0 * p);
  const double b = params.lambda * k.c2 * (1.0 / q - 1.0 / (2.0 * p));
  auto f = [&](double x) { return a * x - b * std::pow(x, 0.5 * q) - energy_cap; };
  // f is convex, negative at its minimizer, and tends to +infinity.
  double lo = b > 0.0 ? std::pow(0.5 * q * b / a, 2.0 / (2.0 - q)) : 0.0;
  if (f(lo) > 0.0)
    return lo;
  double hi = std::max(1.0, 2.0 * lo);
  while (f(hi) <= 0.0)
    hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) <= 0.0 ? lo : hi) = mid;
  }
  return hi;
}

} // namespace choquard
