#pragma once

#include "choquard/extremal.hpp"
#include "choquard/functional.hpp"
#include "choquard/solver.hpp"

#include <cstdint>
#include <string>

namespace choquard {

// Resolved run configuration. Parsed from JSON with blocks grid, params,
// solver and the scalar rng_seed; absent keys keep the defaults below
// (the flagship problem), unknown keys are rejected.
struct RunConfig {
  int dimension = 3;
  double r_max = 20.0;
  std::size_t count = 2048;
  Spacing spacing = Spacing::uniform;

  double alpha = 2.0;
  double p = 2.0;
  double q = 1.5;
  double v0 = 1.0;
  double s = 4.0;

  double tol_residual = 1e-9;
  int max_iters = 4000;
  double step0 = 1.0;
  int multistarts = 3;
  bool warm_start = true;

  std::uint64_t rng_seed = 0;

  // Throws ConfigError.
  static RunConfig from_json(const std::string& text);
  static RunConfig load(const std::string& path);
  void validate() const;

  // Canonical JSON (fixed key order, 17 significant digits).
  std::string to_json() const;
  // FNV-1a of to_json().
  std::uint64_t hash() const;

  ProblemParams problem(double lambda = 0.0) const;
  GridPtr make_grid() const;
  Model make_model(double lambda = 0.0) const;
  SolverOptions solver_options() const;
  ExtremalOptions extremal_options() const;
};

std::string format_double(double x);

} // namespace choquard
