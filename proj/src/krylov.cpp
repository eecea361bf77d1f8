#include "choquard/krylov.hpp"

#include <cmath>

namespace choquard {

namespace {

double dot(std::span<const double> a, std::span<const double> b, std::span<const double> w) {
  double s = 0.0;
  if (w.empty()) {
    for (std::size_t i = 0; i < a.size(); ++i)
      s += a[i] * b[i];
  } else {
    for (std::size_t i = 0; i < a.size(); ++i)
      s += w[i] * a[i] * b[i];
  }
  return s;
}

} // namespace

GmresResult gmres(const LinearMap& apply, const LinearMap& precondition, std::span<const double> rhs,
                  std::span<const double> weights, double rtol, int restart, int max_iterations) {
  const std::size_t n = rhs.size();
  GmresResult out;
  out.x.assign(n, 0.0);

  const double b_norm = std::sqrt(dot(rhs, rhs, weights));
  if (b_norm == 0.0) {
    out.converged = true;
    return out;
  }

  std::vector<double> r(rhs.begin(), rhs.end());
  while (out.iterations < max_iterations) {
    const double beta = std::sqrt(dot(r, r, weights));
    out.relative_residual = beta / b_norm;
    if (out.relative_residual <= rtol) {
      out.converged = true;
      return out;
    }

    const int m = restart;
    std::vector<std::vector<double>> basis(m + 1, std::vector<double>(n));
    std::vector<std::vector<double>> zs(m);
    std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m), sn(m), g(m + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      basis[0][i] = r[i] / beta;
    g[0] = beta;

    int k = 0;
    for (; k < m && out.iterations < max_iterations; ++k, ++out.iterations) {
      zs[k] = precondition(basis[k]);
      std::vector<double> w = apply(zs[k]);
      // Modified Gram-Schmidt, applied twice for stability.
      for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j <= k; ++j) {
          const double hij = dot(w, basis[j], weights);
          h[j][k] += hij;
          for (std::size_t i = 0; i < n; ++i)
            w[i] -= hij * basis[j][i];
        }
      }
      h[k + 1][k] = std::sqrt(dot(w, w, weights));
      if (h[k + 1][k] > 0.0) {
        for (std::size_t i = 0; i < n; ++i)
          basis[k + 1][i] = w[i] / h[k + 1][k];
      }
      for (int j = 0; j < k; ++j) {
        const double t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
        h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
        h[j][k] = t;
      }
      const double denom = std::hypot(h[k][k], h[k + 1][k]);
      cs[k] = h[k][k] / denom;
      sn[k] = h[k + 1][k] / denom;
      h[k][k] = denom;
      h[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) / b_norm <= rtol) {
        ++k;
        ++out.iterations;
        break;
      }
    }

    std::vector<double> y(k);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j)
        s -= h[i][j] * y[j];
      y[i] = s / h[i][i];
    }
    for (int j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i)
        out.x[i] += y[j] * zs[j][i];

    const std::vector<double> ax = apply(out.x);
    for (std::size_t i = 0; i < n; ++i)
      r[i] = rhs[i] - ax[i];
  }
  out.relative_residual = std::sqrt(dot(r, r, weights)) / b_norm;
  out.converged = out.relative_residual <= rtol;
  return out;
}

} // namespace choquard
