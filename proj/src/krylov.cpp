#include "hallhom/krylov.hpp"

#include <algorithm>
#include <cmath>

#include "hallhom/error.hpp"
#include "hallhom/kernels/kernels.hpp"

namespace hallhom {

namespace k = kernels;

double norm2(std::span<const double> v) { return std::sqrt(k::dot(v, v)); }

void remove_mean(std::span<double> v) {
  if (v.empty()) return;
  const double mean = k::sum(v) / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

ApplyFn jacobi_preconditioner(std::vector<double> diagonal) {
  for (double& d : diagonal) {
    if (d == 0.0 || !std::isfinite(d)) throw ValidationError("zero or non-finite diagonal entry");
    d = 1.0 / d;
  }
  return [inv = std::move(diagonal)](std::span<const double> r, std::span<double> z) {
    k::multiply(inv, r, z);
  };
}

namespace {

void residual(const LinearOperator& a, std::span<const double> b, std::span<const double> x,
              std::span<double> r) {
  a.apply(x, r);
  k::xpby(b, -1.0, r);  // r = b − Ax
}

}  // namespace

KrylovResult fgmres(const LinearOperator& a, std::span<const double> b_in, std::span<double> x,
                    const ApplyFn& precond, const KrylovOptions& opt) {
  const std::size_t n = a.size;
  const int m = std::max(1, opt.restart);
  std::vector<double> b(b_in.begin(), b_in.end());
  if (opt.project) {
    opt.project(b);
    opt.project(x);
  }
  KrylovResult result;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    result.converged = true;
    return result;
  }

  std::vector<std::vector<double>> v(m + 1, std::vector<double>(n));
  std::vector<std::vector<double>> z(m, std::vector<double>(n));
  std::vector<double> h((m + 1) * m), cs(m), sn(m), g(m + 1), y(m);
  auto H = [&](int i, int j) -> double& { return h[static_cast<std::size_t>(j) * (m + 1) + i]; };

  residual(a, b, x, v[0]);
  double rnorm = norm2(v[0]);
  result.relative_residual = rnorm / bnorm;
  while (result.iterations < opt.max_iterations) {
    if (result.relative_residual <= opt.rtol) {
      result.converged = true;
      break;
    }
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = rnorm;
    for (double& vi : v[0]) vi /= rnorm;

    int j = 0;
    for (; j < m && result.iterations < opt.max_iterations; ++j) {
      ++result.iterations;
      precond(v[j], z[j]);
      if (opt.project) opt.project(z[j]);
      a.apply(z[j], v[j + 1]);
      // Modified Gram–Schmidt, one reorthogonalization pass for stability.
      for (int i = 0; i <= j; ++i) {
        const double hij = k::dot(v[i], v[j + 1]);
        k::axpy(-hij, v[i], v[j + 1]);
        H(i, j) = hij;
      }
      for (int i = 0; i <= j; ++i) {
        const double c = k::dot(v[i], v[j + 1]);
        k::axpy(-c, v[i], v[j + 1]);
        H(i, j) += c;
      }
      const double hnext = norm2(v[j + 1]);
      H(j + 1, j) = hnext;
      if (hnext > 0.0)
        for (double& vi : v[j + 1]) vi /= hnext;
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom = std::hypot(H(j, j), H(j + 1, j));
      cs[j] = denom == 0.0 ? 1.0 : H(j, j) / denom;
      sn[j] = denom == 0.0 ? 0.0 : H(j + 1, j) / denom;
      H(j, j) = denom;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      if (std::abs(g[j + 1]) / bnorm <= opt.rtol || hnext == 0.0) {
        ++j;
        break;
      }
    }
    // Back substitution on the j×j upper triangle.
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int l = i + 1; l < j; ++l) s -= H(i, l) * y[l];
      y[i] = H(i, i) == 0.0 ? 0.0 : s / H(i, i);
    }
    for (int i = 0; i < j; ++i) k::axpy(y[i], z[i], x);
    if (opt.project) opt.project(x);

    residual(a, b, x, v[0]);
    rnorm = norm2(v[0]);
    const double previous = result.relative_residual;
    result.relative_residual = rnorm / bnorm;
    if (result.relative_residual <= opt.rtol) {
      result.converged = true;
      break;
    }
    // A restart cycle that gained nothing will not gain anything later.
    if (result.relative_residual >= previous * (1.0 - 1e-14)) break;
  }
  return result;
}

KrylovResult pcg(const LinearOperator& a, std::span<const double> b_in, std::span<double> x,
                 const ApplyFn& precond, const KrylovOptions& opt) {
  const std::size_t n = a.size;
  std::vector<double> b(b_in.begin(), b_in.end());
  if (opt.project) {
    opt.project(b);
    opt.project(x);
  }
  KrylovResult result;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    result.converged = true;
    return result;
  }
  std::vector<double> r(n), z(n), p(n), q(n);
  residual(a, b, x, r);
  precond(r, z);
  if (opt.project) opt.project(z);
  p = z;
  double rz = k::dot(r, z);
  result.relative_residual = norm2(r) / bnorm;
  while (result.relative_residual > opt.rtol && result.iterations < opt.max_iterations) {
    ++result.iterations;
    a.apply(p, q);
    const double pq = k::dot(p, q);
    if (!(pq > 0.0)) break;
    const double alpha = rz / pq;
    k::axpy(alpha, p, x);
    k::axpy(-alpha, q, r);
    result.relative_residual = norm2(r) / bnorm;
    if (result.relative_residual <= opt.rtol) break;
    precond(r, z);
    if (opt.project) opt.project(z);
    const double rz_next = k::dot(r, z);
    k::xpby(z, rz_next / rz, p);
    rz = rz_next;
  }
  result.converged = result.relative_residual <= opt.rtol;
  if (opt.project) opt.project(x);
  // Report the true residual rather than the recursively updated one.
  residual(a, b, x, r);
  result.relative_residual = norm2(r) / bnorm;
  return result;
}

}  // namespace hallhom
