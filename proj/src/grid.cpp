#include "choquard/grid.hpp"

#include "choquard/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace choquard {

namespace {

constexpr double kGradedExponent = 1.5;
constexpr std::size_t kMinNodes = 16;

double shell_volume(int dim, double lo, double hi) {
  return unit_sphere_area(dim) * (std::pow(hi, dim) - std::pow(lo, dim)) / dim;
}

} // namespace

double unit_sphere_area(int dimension) {
  const double half = 0.5 * dimension;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

GridPtr RadialGrid::build(int dimension, double r_max, std::size_t count, Spacing spacing) {
  if (dimension < 3)
    throw InvalidArgument("grid dimension must be >= 3");
  if (!(r_max > 0.0) || !std::isfinite(r_max))
    throw InvalidArgument("grid r_max must be positive");
  if (count < kMinNodes)
    throw InvalidArgument("grid needs at least 16 nodes");

  std::shared_ptr<RadialGrid> g(new RadialGrid());
  g->dimension_ = dimension;
  g->r_max_ = r_max;
  g->spacing_ = spacing;

  const auto m = count;
  g->faces_.resize(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(m);
    g->faces_[k] = r_max * (spacing == Spacing::uniform ? s : std::pow(s, kGradedExponent));
  }
  g->faces_[m] = r_max;

  g->nodes_.resize(m);
  g->weights_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    g->nodes_[i] = 0.5 * (g->faces_[i] + g->faces_[i + 1]);
    g->weights_[i] = shell_volume(dimension, g->faces_[i], g->faces_[i + 1]);
  }

  const double area = unit_sphere_area(dimension);
  g->conductance_.assign(m + 1, 0.0);
  for (std::size_t k = 1; k <= m; ++k) {
    const double dist = (k < m ? g->nodes_[k] : r_max) - g->nodes_[k - 1];
    g->conductance_[k] = area * std::pow(g->faces_[k], dimension - 1) / dist;
  }
  return g;
}

double RadialGrid::ball_volume(double r) const {
  return unit_sphere_area(dimension_) * std::pow(std::clamp(r, 0.0, r_max_), dimension_) / dimension_;
}

// ---------------------------------------------------------------- Field

Field::Field(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size(), 0.0) {}

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size())
    throw InvalidArgument("field size does not match grid");
}

Field Field::sample(GridPtr grid, const std::function<double(double)>& fn) {
  Field f(grid);
  for (std::size_t i = 0; i < f.size(); ++i)
    f.values_[i] = fn(grid->node(i));
  return f;
}

Field Field::indicator_ball(GridPtr grid, double radius) {
  Field f(grid);
  const auto faces = grid->faces();
  const int dim = grid->dimension();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double lo = faces[i];
    const double hi = faces[i + 1];
    if (hi <= radius)
      f.values_[i] = 1.0;
    else if (lo < radius)
      f.values_[i] = shell_volume(dim, lo, radius) / grid->weight(i);
  }
  return f;
}

double Field::sup_norm() const {
  double m = 0.0;
  for (double v : values_)
    m = std::max(m, std::abs(v));
  return m;
}

bool Field::is_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i)
    values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i)
    values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double c) {
  for (double& v : values_)
    v *= c;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double c, Field a) { return a *= c; }

Field hadamard(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = a[i] * b[i];
  return out;
}

Field abs(Field a) {
  for (double& v : a.values())
    v = std::abs(v);
  return a;
}

Field resample(const Field& u, GridPtr target) {
  const auto& src = *u.grid();
  if (src.dimension() != target->dimension())
    throw InvalidArgument("resample across dimensions");
  const std::size_t m = src.size();
  const double rmax = src.r_max();

  // Extended stencil: two mirrored nodes on each side.
  std::vector<double> xs, ys;
  xs.reserve(m + 4);
  ys.reserve(m + 4);
  for (int k = 1; k >= 0; --k) {
    xs.push_back(-src.node(k));
    ys.push_back(u[k]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    xs.push_back(src.node(i));
    ys.push_back(u[i]);
  }
  for (std::size_t k = 1; k <= 2; ++k) {
    xs.push_back(2.0 * rmax - src.node(m - k));
    ys.push_back(-u[m - k]);
  }

  Field out(target);
  for (std::size_t i = 0; i < target->size(); ++i) {
    const double r = target->node(i);
    if (r > rmax)
      continue;
    auto it = std::upper_bound(xs.begin(), xs.end(), r);
    std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    hi = std::clamp<std::size_t>(hi, 2, xs.size() - 2);
    const std::size_t lo = hi - 2;
    double v = 0.0;
    for (std::size_t a = lo; a < lo + 4; ++a) {
      double basis = 1.0;
      for (std::size_t b = lo; b < lo + 4; ++b) {
        if (b != a)
          basis *= (r - xs[b]) / (xs[a] - xs[b]);
      }
      v += basis * ys[a];
    }
    out[i] = v;
  }
  return out;
}

void require_same_grid(const Field& a, const Field& b) {
  if (!a.grid() || a.grid() != b.grid())
    throw GridMismatch();
}

// ---------------------------------------------------------------- potential

double PotentialSpec::operator()(double r) const { return v0 + std::pow(r, growth_exponent); }

void PotentialSpec::validate(int dimension) const {
  if (!(v0 > 0.0))
    throw InvalidArgument("potential v0 must be positive");
  if (!(growth_exponent > dimension))
    throw InvalidArgument("potential growth exponent must exceed the dimension");
}

// ---------------------------------------------------------------- quadrature

double integrate(const Field& f) {
  const auto w = f.grid()->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s += w[i] * f[i];
  return s;
}

double l2_inner(const Field& f, const Field& g) {
  require_same_grid(f, g);
  const auto w = f.grid()->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s += w[i] * f[i] * g[i];
  return s;
}

double lq_norm_pow(const Field& u, double q) {
  if (!(q >= 1.0))
    throw DomainError("lq_norm_pow requires q >= 1");
  const auto w = u.grid()->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    s += w[i] * std::pow(std::abs(u[i]), q);
  return s;
}

double x_inner(const Field& u, const Field& w, const PotentialSpec& pot) {
  require_same_grid(u, w);
  const auto& g = *u.grid();
  const std::size_t m = g.size();
  double grad = 0.0;
  for (std::size_t k = 1; k < m; ++k)
    grad += g.face_conductance(k) * (u[k] - u[k - 1]) * (w[k] - w[k - 1]);
  grad += g.face_conductance(m) * u[m - 1] * w[m - 1];

  double mass = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    mass += g.weight(i) * pot(g.node(i)) * u[i] * w[i];
  return grad + mass;
}

double x_norm_sq(const Field& u, const PotentialSpec& pot) { return x_inner(u, u, pot); }

Tridiagonal operator_matrix(const RadialGrid& g, const PotentialSpec& pot) {
  const std::size_t m = g.size();
  Tridiagonal t;
  t.lower.assign(m, 0.0);
  t.diag.assign(m, 0.0);
  t.upper.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double left = g.face_conductance(i);
    const double right = g.face_conductance(i + 1);
    const double w = g.weight(i);
    t.diag[i] = (left + right) / w + pot(g.node(i));
    if (i > 0)
      t.lower[i] = -left / w;
    if (i + 1 < m)
      t.upper[i] = -right / w;
  }
  return t;
}

Field apply_operator(const Field& u, const PotentialSpec& pot) {
  const auto t = operator_matrix(*u.grid(), pot);
  return Field(u.grid(), t.apply(u.values()));
}

std::vector<double> Tridiagonal::apply(std::span<const double> x) const {
  const std::size_t n = diag.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag[i] * x[i];
    if (i > 0)
      v += lower[i] * x[i - 1];
    if (i + 1 < n)
      v += upper[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

std::vector<double> Tridiagonal::solve(std::span<const double> rhs) const {
  const std::size_t n = diag.size();
  std::vector<double> c(n), d(n);
  double denom = diag[0];
  c[0] = upper[0] / denom;
  d[0] = rhs[0] / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - lower[i] * c[i - 1];
    c[i] = upper[i] / denom;
    d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

} // namespace choquard
