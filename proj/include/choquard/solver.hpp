#pragma once

#include "choquard/extremal.hpp"
#include "choquard/fibering.hpp"
#include "choquard/functional.hpp"

#include <optional>
#include <vector>

namespace choquard {

struct SolverOptions {
  // Relative to residual_scale().
  double tol_residual = 1e-9;
  int max_iters = 4000;
  // Initial Sobolev step; 1 is the fixed-point step u <- (-Delta+V)^{-1}(F(u) + lambda s(u)).
  double step0 = 1.0;
  int multistarts = 3;
  bool warm_start = true;
  // Descent hands over to Newton-GMRES below this relative residual.
  double newton_switch = 1e-3;
};

struct Solution {
  Field u;
  double lambda = 0.0;
  BranchTag requested = BranchTag::N_plus;
  // Classification of the converged field.
  BranchTag branch = BranchTag::off_nehari;
  double energy = 0.0;
  FiberCoefficients coef;
  double second_form_val = 0.0;
  double residual_sup = 0.0;
  double residual_scale = 0.0;
  int iterations = 0;
  bool converged = false;

  // ||u||_X.
  double norm() const;
  double relative_residual() const { return residual_scale > 0.0 ? residual_sup / residual_scale : residual_sup; }
};

// t u with t the requested root of Q_n(t) = lambda (t_zero on N_minus when lambda = 0).
Field project_nehari(const Field& u, const Model& model, BranchTag branch);

// Minimizes E_lambda on the requested Nehari component starting from seed.
// Throws NonConvergence carrying no partial data; the returned Solution always has converged = true.
Solution solve_branch(const Model& model, BranchTag branch, const Field& seed, const SolverOptions& opts);

// Cold start: the extremal minimizer (when given) plus the named seed profiles,
// keeping the lowest-energy converged solution of the requested branch.
Solution solve_branch_cold(const Model& model, BranchTag branch, const SolverOptions& opts,
                           const Field* extremal_minimizer = nullptr);

struct DiagramRow {
  double lambda = 0.0;
  std::optional<Solution> u;
  std::optional<Solution> v;

  bool ok() const { return u && v; }
  double e1() const;
  double e2() const;
  int sign_e2() const;
};

struct BranchDiagram {
  std::vector<DiagramRow> rows;
  bool all_ok() const;
};

// Two-branch solve at each lambda (strictly increasing, in (0, lambda_n]).
// With warm_start the previous row seeds the next and a failed step is retried
// through halved intermediate lambdas; rows that still fail are recorded empty.
BranchDiagram sweep(const Model& model, const std::vector<double>& lambdas, const SolverOptions& opts,
                    const Field* extremal_minimizer = nullptr);

struct LimitResult {
  Solution u;
  Solution v;
  // lambda_j = (1 - 2^{-j}) lambda_n, j = 1..J, followed by lambda_n itself.
  std::vector<Solution> path_u;
  std::vector<Solution> path_v;
};

LimitResult limit_to_lambda_n(const Model& model, const ExtremalResult& extremal, const SolverOptions& opts,
                              int steps = 8);

// Positive solution with lambda = 0 on the N_minus component.
Solution solve_lambda_zero(const Model& model, const SolverOptions& opts, const Field* seed = nullptr);

struct EmbeddingConstants {
  // B <= c1 A^p, from HLS, the Sobolev inequality and V >= v0.
  double c1 = 0.0;
  // G <= c2 A^{q/2}, from Hoelder against V^{-q/(2-q)}.
  double c2 = 0.0;
};

EmbeddingConstants embedding_constants(const ProblemParams& params);

// C_{p,q} / (c2 c1^{(2-q)/(2p-2)}), a lower bound for every Lambda_n(u).
double lambda_n_lower_bound(const ProblemParams& params);

// Largest A with (p-1)/(2p) A - lambda c2 (1/q - 1/(2p)) A^{q/2} <= energy_cap;
// every Nehari point with E_lambda <= energy_cap has ||u||^2 below it.
double coercivity_bound(const ProblemParams& params, double energy_cap);

} // namespace choquard
