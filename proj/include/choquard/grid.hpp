#pragma once

// Radial finite-volume discretization of R^N truncated to the ball of radius
// r_max. Node i sits at the centre of the shell [faces[i], faces[i+1]] and its
// quadrature weight is the exact shell volume, so piecewise-constant fields
// integrate exactly. The origin face carries no flux (even reflection) and
// the outer face carries the homogeneous Dirichlet value.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace choquard {

enum class Spacing { uniform, graded };

// Surface area of the unit sphere S^{N-1} in R^N.
double unit_sphere_area(int dimension);

class RadialGrid {
public:
  static std::shared_ptr<const RadialGrid>
  build(int dimension, double r_max, std::size_t count, Spacing spacing = Spacing::uniform);

  int dimension() const { return dimension_; }
  double r_max() const { return r_max_; }
  std::size_t size() const { return nodes_.size(); }
  Spacing spacing() const { return spacing_; }

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  // size()+1 shell boundaries, faces[0] = 0, faces[size()] = r_max.
  std::span<const double> faces() const { return faces_; }

  double node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  // Volume of {|x| <= r} for r in [0, r_max].
  double ball_volume(double r) const;

  // Flux coefficient S_k / d_k across face k (k = 1..size()); face 0 carries none.
  double face_conductance(std::size_t k) const { return conductance_[k]; }

private:
  RadialGrid() = default;

  int dimension_ = 3;
  double r_max_ = 0.0;
  Spacing spacing_ = Spacing::uniform;
  std::vector<double> faces_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> conductance_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

class Field {
public:
  Field() = default;
  explicit Field(GridPtr grid);
  Field(GridPtr grid, std::vector<double> values);

  static Field sample(GridPtr grid, const std::function<double(double)>& fn);
  // Cell averages of the indicator of {|x| <= radius}.
  static Field indicator_ball(GridPtr grid, double radius);

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  double sup_norm() const;
  bool is_finite() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double c);

private:
  GridPtr grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double c, Field a);
// Node-wise product.
Field hadamard(const Field& a, const Field& b);
Field abs(Field a);

// Cubic Lagrange interpolation of u onto another grid of the same dimension,
// continued evenly through the origin and oddly through the Dirichlet face.
Field resample(const Field& u, GridPtr target);

void require_same_grid(const Field& a, const Field& b);

// V(r) = v0 + r^s.
struct PotentialSpec {
  double v0 = 1.0;
  double growth_exponent = 4.0;

  double operator()(double r) const;
  void validate(int dimension) const;
};

double integrate(const Field& f);
// L^2 pairing sum_i w_i f_i g_i.
double l2_inner(const Field& f, const Field& g);
double lq_norm_pow(const Field& u, double q);

double x_inner(const Field& u, const Field& w, const PotentialSpec& pot);
double x_norm_sq(const Field& u, const PotentialSpec& pot);

// Node-wise -u'' - (N-1)/r u' + V u, the L^2 representative of x_inner.
Field apply_operator(const Field& u, const PotentialSpec& pot);

// Tridiagonal coefficients of apply_operator in node-wise form.
struct Tridiagonal {
  std::vector<double> lower; // lower[i] multiplies u[i-1], lower[0] = 0
  std::vector<double> diag;
  std::vector<double> upper; // upper[i] multiplies u[i+1], upper[n-1] = 0

  std::vector<double> apply(std::span<const double> x) const;
  // Thomas algorithm; the matrix must be diagonally dominant.
  std::vector<double> solve(std::span<const double> rhs) const;
};

Tridiagonal operator_matrix(const RadialGrid& grid, const PotentialSpec& pot);

} // namespace choquard
