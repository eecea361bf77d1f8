#pragma once

#include "choquard/fibering.hpp"
#include "choquard/functional.hpp"

#include <string>
#include <vector>

namespace choquard {

// Named positive seed profiles: "gaussian" e^{-r^2}, "exp_poly" (1+r)e^{-r},
// "wide_gaussian" e^{-r^2/4}.
Field seed_profile(const GridPtr& grid, const std::string& name);
const std::vector<std::string>& seed_profile_names();

struct ExtremalOptions {
  int max_iters = 20000;
  // Initial step as a fraction of ||u||_X.
  double step0 = 0.1;
  // Stop descent once Lambda_n decreased by less than tol (relative) over 10 steps.
  double tol = 1e-13;
  int multistarts = 3;
  // Bordered Newton polish of the Euler-Lagrange system after descent.
  bool polish = true;
};

struct ExtremalResult {
  double lambda_n = 0.0;
  double lambda_e = 0.0;
  // Positive, normalized to ||u||_q = 1.
  Field minimizer;
  int iterations = 0;
  double el_residual_sup = 0.0;
  double el_residual_scale = 0.0;
  bool converged = false;
  std::string seed;
};

struct ResidualReport {
  double sup = 0.0;
  double scale = 0.0;
  double relative() const { return scale > 0.0 ? sup / scale : sup; }
};

// Minimizes Lambda_n over radial fields from one seed.
ExtremalResult minimize_lambda_n_from(const Model& model, const Field& seed, const ExtremalOptions& opts,
                                      const std::string& seed_name = "custom");

// Multistart over seed_profile_names() (first opts.multistarts of them); keeps the lowest lambda_n.
// Throws NonConvergence when no start converged; the best partial result is
// still reachable through minimize_lambda_n_from.
ExtremalResult minimize_lambda_n(const Model& model, const ExtremalOptions& opts);

// Sup over interior nodes of |2(-Lap v + V v) - 2p (I*|v|^p)|v|^{p-2}v - q lambda_n |v|^{q-2}v|
// at v = t_n(u) u. When model lives on a different grid than the result, the
// minimizer is first interpolated onto model.grid.
ResidualReport el_residual(const ExtremalResult& result, const Model& model);

// Independent minimization of Lambda_e, evaluated through Q_e(t_e) and its own
// gradient. Returns the infimum; the minimizer is stored in *minimizer when given.
double lambda_e_direct(const Model& model, const ExtremalOptions& opts, Field* minimizer = nullptr);

// Lambda_n of an arbitrary nonzero field.
double lambda_n_of(const Field& u, const Model& model);
double lambda_e_of(const Field& u, const Model& model);

} // namespace choquard
