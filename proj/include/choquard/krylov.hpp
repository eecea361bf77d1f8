#pragma once

#include <functional>
#include <span>
#include <vector>

namespace choquard {

using LinearMap = std::function<std::vector<double>(std::span<const double>)>;

struct GmresResult {
  std::vector<double> x;
  double relative_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Right-preconditioned restarted GMRES for A x = b in the inner product
// <x, y> = sum_i weight_i x_i y_i (weights may be empty for the Euclidean one).
GmresResult gmres(const LinearMap& apply, const LinearMap& precondition, std::span<const double> rhs,
                  std::span<const double> weights, double rtol = 1e-10, int restart = 60,
                  int max_iterations = 600);

} // namespace choquard
