#include "hallhom/kernels/kernels.hpp"

namespace hallhom::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpby(const double* x, double beta, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void multiply(const double* a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * x[i];
}

double sum(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

void stencil9(const Stencil9View& s, const double* x, double* y) {
  const int n = s.n;
  for (int j = 0; j < n; ++j) {
    const int rows[3] = {j == 0 ? n - 1 : j - 1, j, j == n - 1 ? 0 : j + 1};
    for (int i = 0; i < n; ++i) {
      const int cols[3] = {i == 0 ? n - 1 : i - 1, i, i == n - 1 ? 0 : i + 1};
      const std::size_t node = static_cast<std::size_t>(j) * n + i;
      double acc = 0.0;
      for (int dj = 0; dj < 3; ++dj) {
        const std::size_t row = static_cast<std::size_t>(rows[dj]) * n;
        for (int di = 0; di < 3; ++di) acc += s.coef[dj * 3 + di][node] * x[row + cols[di]];
      }
      y[node] = acc;
    }
  }
}

void stencil27(const Stencil27View& s, const double* x, double* y) {
  const int mx = s.mx, my = s.my, mz = s.mz;
  const std::size_t plane = static_cast<std::size_t>(mx) * my;
  for (int k = 0; k < mz; ++k) {
    for (int j = 0; j < my; ++j) {
      for (int i = 0; i < mx; ++i) {
        const std::size_t node2d = static_cast<std::size_t>(j) * mx + i;
        double acc = 0.0;
        for (int dk = -1; dk <= 1; ++dk) {
          const int kk = k + dk;
          if (kk < 0 || kk >= mz) continue;
          for (int dj = -1; dj <= 1; ++dj) {
            const int jj = j + dj;
            if (jj < 0 || jj >= my) continue;
            for (int di = -1; di <= 1; ++di) {
              const int ii = i + di;
              if (ii < 0 || ii >= mx) continue;
              const int slot = (dk + 1) * 9 + (dj + 1) * 3 + (di + 1);
              acc += s.coef[slot][node2d] *
                     x[kk * plane + static_cast<std::size_t>(jj) * mx + ii];
            }
          }
        }
        y[k * plane + node2d] = acc;
      }
    }
  }
}

}  // namespace hallhom::kernels::scalar
