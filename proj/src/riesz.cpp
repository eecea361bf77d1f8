#include "choquard/riesz.hpp"

#include "choquard/error.hpp"

#include <cmath>
#include <numbers>

namespace choquard {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kSelfCellNodes = 24;

double signed_pow(double x, double e) {
  if (x == 0.0)
    return 0.0;
  return std::copysign(std::pow(std::abs(x), e), x);
}

} // namespace

double riesz_constant(int dimension, double alpha) {
  if (!(alpha > 0.0 && alpha < dimension))
    throw DomainError("riesz_constant requires 0 < alpha < N");
  const double n = dimension;
  const double value = std::tgamma(0.5 * (n - alpha)) /
                       (std::tgamma(0.5 * alpha) * std::pow(kPi, 0.5 * n) * std::pow(2.0, alpha));
  if (!std::isfinite(value))
    throw DomainError("riesz_constant overflow");
  return value;
}

double hls_sharp_constant(int dimension, double alpha) {
  if (!(alpha > 0.0 && alpha < dimension))
    throw DomainError("hls_sharp_constant requires 0 < alpha < N");
  const double n = dimension;
  return std::pow(kPi, n - alpha) * std::tgamma(0.5 * alpha) / std::tgamma(0.5 * (n + 2.0)) *
         std::pow(std::tgamma(0.5 * n) / std::tgamma(n), -alpha / n);
}

double hls_lieb_constant(int dimension, double alpha) {
  if (!(alpha > 0.0 && alpha < dimension))
    throw DomainError("hls_lieb_constant requires 0 < alpha < N");
  const double n = dimension;
  return std::pow(kPi, 0.5 * (n - alpha)) * std::tgamma(0.5 * alpha) / std::tgamma(0.5 * (n + alpha)) *
         std::pow(std::tgamma(0.5 * n) / std::tgamma(n), -alpha / n);
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
        break;
    }
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

RieszOperator::RieszOperator(GridPtr grid, double alpha, RieszBackend backend, int angular_nodes)
    : grid_(std::move(grid)), alpha_(alpha), backend_(backend) {
  const int dim = grid_->dimension();
  constant_ = riesz_constant(dim, alpha);
  if (backend_ == RieszBackend::newtonian_exact && !(dim == 3 && alpha == 2.0))
    throw InvalidArgument("newtonian_exact backend requires N = 3 and alpha = 2");
  if (angular_nodes < 4)
    throw InvalidArgument("angular quadrature needs at least 4 nodes");

  std::tie(quad_u_, quad_w_) = gauss_legendre_unit(angular_nodes);
  angular_norm_ = unit_sphere_area(dim - 1) / unit_sphere_area(dim);

  const std::size_t m = grid_->size();
  self_.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    self_[i] = self_cell_integral(i);

  if (backend_ == RieszBackend::dense_kernel) {
    kernel_.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const double k = reduced_kernel(grid_->node(i), grid_->node(j));
        kernel_[i * m + j] = k;
        kernel_[j * m + i] = k;
      }
    }
  }
}

RieszOperator RieszOperator::for_problem(GridPtr grid, double alpha) {
  const bool newtonian = grid->dimension() == 3 && alpha == 2.0;
  return RieszOperator(std::move(grid), alpha,
                       newtonian ? RieszBackend::newtonian_exact : RieszBackend::dense_kernel);
}

double RieszOperator::kernel_at(double r) const {
  return constant_ / std::pow(r, grid_->dimension() - alpha_);
}

double RieszOperator::reduced_kernel(double r, double s) const {
  const int dim = grid_->dimension();
  const double expo = 0.5 * (alpha_ - dim);
  if (backend_ == RieszBackend::newtonian_exact)
    return constant_ / std::max(r, s);
  if (r == 0.0 || s == 0.0)
    return constant_ * std::pow(std::max(r, s), alpha_ - dim);

  // |x - y|^2 = (r - s)^2 + 4 r s u^2 after cos(theta) = 1 - 2u^2; the
  // substitution absorbs the endpoint singularity of the angular integrand.
  const double d2 = (r - s) * (r - s);
  const double rs4 = 4.0 * r * s;
  const double jac_pow = 0.5 * (dim - 3);
  double sum = 0.0;
  for (std::size_t k = 0; k < quad_u_.size(); ++k) {
    const double u = quad_u_[k];
    const double u2 = u * u;
    const double dist2 = d2 + rs4 * u2;
    const double radial = (expo == -0.5) ? 1.0 / std::sqrt(dist2) : std::pow(dist2, expo);
    const double jac = (dim == 3) ? 1.0 : std::pow(4.0 * u2 * (1.0 - u2), jac_pow);
    sum += quad_w_[k] * radial * jac * 4.0 * u;
  }
  return constant_ * angular_norm_ * sum;
}

double RieszOperator::self_cell_integral(std::size_t i) const {
  const auto faces = grid_->faces();
  const double lo = faces[i];
  const double hi = faces[i + 1];
  const double r = grid_->node(i);
  const int dim = grid_->dimension();
  const double area = unit_sphere_area(dim);

  if (backend_ == RieszBackend::newtonian_exact) {
    // (1/4pi) int_cell dV / max(r, s)
    return constant_ * area * ((r * r * r - lo * lo * lo) / (3.0 * r) + 0.5 * (hi * hi - r * r));
  }

  // Graded Gauss rule s = r -/+ L v^2 on each half-cell, clustering at s = r.
  static const auto rule = gauss_legendre_unit(kSelfCellNodes);
  double sum = 0.0;
  for (int side = 0; side < 2; ++side) {
    const double len = side == 0 ? r - lo : hi - r;
    for (std::size_t k = 0; k < rule.first.size(); ++k) {
      const double v = rule.first[k];
      const double s = side == 0 ? r - len * v * v : r + len * v * v;
      const double ds = 2.0 * len * v;
      sum += rule.second[k] * ds * area * std::pow(s, dim - 1) * reduced_kernel(r, s);
    }
  }
  return sum;
}

Field RieszOperator::apply(const Field& f) const {
  if (f.grid() != grid_)
    throw GridMismatch();
  const std::size_t m = grid_->size();
  Field out(grid_);
  const auto w = grid_->weights();

  if (backend_ == RieszBackend::newtonian_exact) {
    std::vector<double> outer(m + 1, 0.0);
    for (std::size_t j = m; j-- > 0;)
      outer[j] = outer[j + 1] + w[j] * f[j] / grid_->node(j);
    double inner = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      out[i] = constant_ * (inner / grid_->node(i) + outer[i + 1]) + self_[i] * f[i];
      inner += w[i] * f[i];
    }
    return out;
  }

  std::vector<double> wf(m);
  for (std::size_t j = 0; j < m; ++j)
    wf[j] = w[j] * f[j];
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = &kernel_[i * m];
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      s += row[j] * wf[j];
    out[i] = s + self_[i] * f[i];
  }
  return out;
}

double RieszOperator::potential_at(const Field& f, double r) const {
  if (f.grid() != grid_)
    throw GridMismatch();
  if (!(r >= 0.0 && r <= grid_->r_max()))
    throw DomainError("potential_at radius outside the grid");
  const auto w = grid_->weights();
  double s = 0.0;
  for (std::size_t j = 0; j < grid_->size(); ++j) {
    if (r == grid_->node(j))
      s += self_[j] * f[j];
    else
      s += reduced_kernel(r, grid_->node(j)) * w[j] * f[j];
  }
  return s;
}

// ---------------------------------------------------------------- Choquard terms

double choquard_energy(const RieszOperator& op, const Field& u, double p) {
  if (!(p > 1.0))
    throw DomainError("choquard_energy requires p > 1");
  Field up(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i)
    up[i] = std::pow(std::abs(u[i]), p);
  return l2_inner(op.apply(up), up);
}

Field choquard_force(const RieszOperator& op, const Field& u, double p) {
  if (!(p > 1.0))
    throw DomainError("choquard_force requires p > 1");
  Field up(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i)
    up[i] = std::pow(std::abs(u[i]), p);
  Field out = op.apply(up);
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] *= signed_pow(u[i], p - 1.0);
  return out;
}

Field choquard_force_derivative(const RieszOperator& op, const Field& u, const Field& v, double p) {
  require_same_grid(u, v);
  const std::size_t m = u.size();
  Field up(u.grid()), dup(u.grid());
  for (std::size_t i = 0; i < m; ++i) {
    up[i] = std::pow(std::abs(u[i]), p);
    dup[i] = p * signed_pow(u[i], p - 1.0) * v[i];
  }
  const Field pot = op.apply(up);
  const Field dpot = op.apply(dup);
  Field out(u.grid());
  for (std::size_t i = 0; i < m; ++i) {
    if (u[i] == 0.0)
      continue;
    const double a = std::abs(u[i]);
    out[i] = pot[i] * (p - 1.0) * std::pow(a, p - 2.0) * v[i] + dpot[i] * signed_pow(u[i], p - 1.0);
  }
  return out;
}

HlsCheck hls_check(const RieszOperator& op, const Field& phi, const Field& psi, double t) {
  require_same_grid(phi, psi);
  const int dim = op.grid()->dimension();
  const double diagonal = 2.0 * dim / (dim + op.alpha());
  if (std::abs(t - diagonal) > 1e-12)
    throw DomainError("hls_check supports only the diagonal exponent 2N/(N+alpha)");
  const Field pa = abs(phi);
  const Field sa = abs(psi);
  HlsCheck out;
  out.lhs = l2_inner(op.apply(pa), sa) / op.constant();
  out.bound = hls_sharp_constant(dim, op.alpha()) * std::pow(lq_norm_pow(pa, t), 1.0 / t) *
              std::pow(lq_norm_pow(sa, t), 1.0 / t);
  return out;
}

double farfield_ratio(const RieszOperator& op, const Field& u, double p, double r) {
  if (!(r > 0.0 && r <= op.grid()->r_max()))
    throw DomainError("farfield_ratio radius outside the grid");
  Field up(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i)
    up[i] = std::pow(std::abs(u[i]), p);
  return op.potential_at(up, r) / op.kernel_at(r);
}

} // namespace choquard
