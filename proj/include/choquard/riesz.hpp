#pragma once

#include "choquard/grid.hpp"

#include <utility>
#include <vector>

namespace choquard {

enum class RieszBackend {
  newtonian_exact, // alpha = 2, N = 3 only; O(M) cumulative sums
  dense_kernel     // any alpha in (0, N); O(M^2) precomputed kernel
};

// A_alpha(N) = Gamma((N-alpha)/2) / (Gamma(alpha/2) pi^{N/2} 2^alpha).
double riesz_constant(int dimension, double alpha);

// Sharp diagonal Hardy-Littlewood-Sobolev constant for exponent 2N/(N+alpha).
double hls_sharp_constant(int dimension, double alpha);
// Lieb's closed form of the same diagonal constant; never larger than hls_sharp_constant
// for the dimensions in use, so it is the one used for a priori bounds.
double hls_lieb_constant(int dimension, double alpha);

// Radial restriction of f -> I_alpha * f. Immutable once built; apply() and
// potential_at() are pure and may be called concurrently.
class RieszOperator {
public:
  RieszOperator(GridPtr grid, double alpha, RieszBackend backend, int angular_nodes = 64);

  // Picks newtonian_exact when (N, alpha) = (3, 2), dense_kernel otherwise.
  static RieszOperator for_problem(GridPtr grid, double alpha);

  const GridPtr& grid() const { return grid_; }
  double alpha() const { return alpha_; }
  RieszBackend backend() const { return backend_; }
  double constant() const { return constant_; }

  Field apply(const Field& f) const;
  // (I_alpha * f)(r) for an arbitrary radius r in [0, r_max].
  double potential_at(const Field& f, double r) const;
  // A_alpha(N) / r^{N - alpha}.
  double kernel_at(double r) const;

  // Angular mean of A/|x - y|^{N-alpha} over |x| = r, |y| = s.
  double reduced_kernel(double r, double s) const;

private:
  double self_cell_integral(std::size_t i) const;

  GridPtr grid_;
  double alpha_;
  RieszBackend backend_;
  double constant_;
  std::vector<double> quad_u_;
  std::vector<double> quad_w_;
  double angular_norm_ = 0.0;
  // Dense backend: row-major M x M; entry (i, j) multiplies w_j f_j.
  std::vector<double> kernel_;
  // Per-node self-cell integral of the kernel (multiplies f_i).
  std::vector<double> self_;
};

// B = int (I_alpha * |u|^p) |u|^p dx.
double choquard_energy(const RieszOperator& op, const Field& u, double p);

// Node-wise (I_alpha * |u|^p) |u|^{p-2} u, zero where u vanishes.
Field choquard_force(const RieszOperator& op, const Field& u, double p);

// Directional derivative of choquard_force at u along v.
Field choquard_force_derivative(const RieszOperator& op, const Field& u, const Field& v, double p);

struct HlsCheck {
  double lhs = 0.0;
  double bound = 0.0;
};

// lhs = double integral of |phi(x) psi(y)| / |x-y|^{N-alpha}; bound = C ||phi||_t ||psi||_t.
HlsCheck hls_check(const RieszOperator& op, const Field& phi, const Field& psi, double t);

// (I_alpha * |u|^p)(r) / I_alpha(r); tends to ||u||_p^p far from the support.
double farfield_ratio(const RieszOperator& op, const Field& u, double p, double r);

// Gauss-Legendre nodes/weights on [0, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(int n);

} // namespace choquard
