#include "hallhom/kernels/kernels.hpp"

#if defined(HALLHOM_HAVE_AVX2_KERNELS)

#include <immintrin.h>

#define HALLHOM_AVX2 __attribute__((target("avx2,fma")))

namespace hallhom::kernels::avx2 {

namespace {

HALLHOM_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

HALLHOM_AVX2 double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

HALLHOM_AVX2 void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

HALLHOM_AVX2 void xpby(const double* x, double beta, double* y, std::size_t n) {
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = x[i] + beta * y[i];
}

HALLHOM_AVX2 void multiply(const double* a, const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = a[i] * x[i];
}

HALLHOM_AVX2 double sum(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

HALLHOM_AVX2 void stencil9(const Stencil9View& s, const double* x, double* y) {
  const int n = s.n;
  for (int j = 0; j < n; ++j) {
    const std::size_t rows[3] = {static_cast<std::size_t>(j == 0 ? n - 1 : j - 1) * n,
                                 static_cast<std::size_t>(j) * n,
                                 static_cast<std::size_t>(j == n - 1 ? 0 : j + 1) * n};
    const std::size_t base = rows[1];
    auto scalar_node = [&](int i) {
      const int cols[3] = {i == 0 ? n - 1 : i - 1, i, i == n - 1 ? 0 : i + 1};
      double acc = 0.0;
      for (int dj = 0; dj < 3; ++dj)
        for (int di = 0; di < 3; ++di)
          acc += s.coef[dj * 3 + di][base + i] * x[rows[dj] + cols[di]];
      y[base + i] = acc;
    };
    scalar_node(0);
    int i = 1;
    for (; i + 4 <= n - 1; i += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (int dj = 0; dj < 3; ++dj) {
        const double* xr = x + rows[dj] + i - 1;
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(s.coef[dj * 3 + 0] + base + i), _mm256_loadu_pd(xr), acc);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(s.coef[dj * 3 + 1] + base + i), _mm256_loadu_pd(xr + 1), acc);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(s.coef[dj * 3 + 2] + base + i), _mm256_loadu_pd(xr + 2), acc);
      }
      _mm256_storeu_pd(y + base + i, acc);
    }
    for (; i < n; ++i) scalar_node(i);
  }
}

HALLHOM_AVX2 void stencil27(const Stencil27View& s, const double* x, double* y) {
  const int mx = s.mx, my = s.my, mz = s.mz;
  const std::size_t plane = static_cast<std::size_t>(mx) * my;
  for (int k = 0; k < mz; ++k) {
    for (int j = 0; j < my; ++j) {
      const std::size_t row2d = static_cast<std::size_t>(j) * mx;
      double* yrow = y + k * plane + row2d;
      auto scalar_node = [&](int i) {
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
              acc += s.coef[(dk + 1) * 9 + (dj + 1) * 3 + (di + 1)][row2d + i] *
                     x[kk * plane + static_cast<std::size_t>(jj) * mx + ii];
            }
          }
        }
        yrow[i] = acc;
      };
      scalar_node(0);
      int i = 1;
      for (; i + 4 <= mx - 1; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (int dk = -1; dk <= 1; ++dk) {
          const int kk = k + dk;
          if (kk < 0 || kk >= mz) continue;
          for (int dj = -1; dj <= 1; ++dj) {
            const int jj = j + dj;
            if (jj < 0 || jj >= my) continue;
            const double* xr = x + kk * plane + static_cast<std::size_t>(jj) * mx + i - 1;
            const int slot = (dk + 1) * 9 + (dj + 1) * 3;
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(s.coef[slot] + row2d + i), _mm256_loadu_pd(xr), acc);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(s.coef[slot + 1] + row2d + i), _mm256_loadu_pd(xr + 1), acc);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(s.coef[slot + 2] + row2d + i), _mm256_loadu_pd(xr + 2), acc);
          }
        }
        _mm256_storeu_pd(yrow + i, acc);
      }
      for (; i < mx; ++i) scalar_node(i);
    }
  }
}

}  // namespace hallhom::kernels::avx2

#endif
