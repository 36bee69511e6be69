#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "hallhom/kernels/kernels.hpp"

using namespace hallhom::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0, scale = 1e-300;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(a[i]));
  }
  return worst / scale;
}

}  // namespace

TEST_CASE("isa selection") {
  CHECK(isa_available(Isa::scalar));
  const Isa before = active_isa();
  set_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  CHECK(isa_name(Isa::scalar) == "scalar");
  if (isa_available(Isa::avx2)) {
    set_isa(Isa::avx2);
    CHECK(active_isa() == Isa::avx2);
  } else {
    CHECK_THROWS_AS(set_isa(Isa::avx2), std::invalid_argument);
  }
  set_isa(before);
}

#ifdef HALLHOM_HAVE_AVX2_KERNELS
TEST_CASE("avx2 vector kernels match the scalar reference") {
  if (!isa_available(Isa::avx2)) return;
  std::mt19937_64 rng(5);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 64u, 1001u}) {
    const std::vector<double> a = random_vector(n, rng), b = random_vector(n, rng);
    CHECK(avx2::dot(a.data(), b.data(), n) ==
          doctest::Approx(scalar::dot(a.data(), b.data(), n)).epsilon(1e-13));
    CHECK(avx2::sum(a.data(), n) == doctest::Approx(scalar::sum(a.data(), n)).epsilon(1e-13));

    std::vector<double> y1 = b, y2 = b;
    scalar::axpy(0.37, a.data(), y1.data(), n);
    avx2::axpy(0.37, a.data(), y2.data(), n);
    CHECK(max_rel_diff(y1, y2) <= 1e-15);

    y1 = b;
    y2 = b;
    scalar::xpby(a.data(), -1.25, y1.data(), n);
    avx2::xpby(a.data(), -1.25, y2.data(), n);
    CHECK(max_rel_diff(y1, y2) <= 1e-15);

    scalar::multiply(a.data(), b.data(), y1.data(), n);
    avx2::multiply(a.data(), b.data(), y2.data(), n);
    CHECK(max_rel_diff(y1, y2) == 0.0);
  }
}

TEST_CASE("avx2 stencils match the scalar reference") {
  if (!isa_available(Isa::avx2)) return;
  std::mt19937_64 rng(9);
  for (int n : {4, 5, 9, 16, 33}) {
    std::vector<std::vector<double>> coef(9);
    Stencil9View s;
    s.n = n;
    for (int k = 0; k < 9; ++k) {
      coef[k] = random_vector(static_cast<std::size_t>(n) * n, rng);
      s.coef[k] = coef[k].data();
    }
    const std::vector<double> x = random_vector(static_cast<std::size_t>(n) * n, rng);
    std::vector<double> y1(x.size()), y2(x.size());
    scalar::stencil9(s, x.data(), y1.data());
    avx2::stencil9(s, x.data(), y2.data());
    CHECK(max_rel_diff(y1, y2) <= 1e-14);
  }
  for (int m : {1, 2, 5, 8, 11}) {
    const int mx = m, my = m + 1, mz = m + 2;
    std::vector<std::vector<double>> coef(27);
    Stencil27View s;
    s.mx = mx;
    s.my = my;
    s.mz = mz;
    for (int k = 0; k < 27; ++k) {
      coef[k] = random_vector(static_cast<std::size_t>(mx) * my, rng);
      s.coef[k] = coef[k].data();
    }
    const std::vector<double> x = random_vector(static_cast<std::size_t>(mx) * my * mz, rng);
    std::vector<double> y1(x.size()), y2(x.size());
    scalar::stencil27(s, x.data(), y1.data());
    avx2::stencil27(s, x.data(), y2.data());
    CHECK(max_rel_diff(y1, y2) <= 1e-14);
  }
}
#endif

TEST_CASE("dispatching entry points agree across ISAs") {
  std::mt19937_64 rng(21);
  const std::vector<double> a = random_vector(517, rng), b = random_vector(517, rng);
  const Isa before = active_isa();
  set_isa(Isa::scalar);
  const double d_scalar = dot(a, b);
  std::vector<double> y_scalar = b;
  axpy(2.0, a, y_scalar);
  for (Isa isa : {Isa::scalar, Isa::avx2}) {
    if (!isa_available(isa)) continue;
    set_isa(isa);
    CHECK(dot(a, b) == doctest::Approx(d_scalar).epsilon(1e-13));
    std::vector<double> y = b;
    axpy(2.0, a, y);
    CHECK(max_rel_diff(y, y_scalar) <= 1e-15);
  }
  set_isa(before);
}

TEST_CASE("periodic stencil wraps around") {
  const int n = 4;
  std::vector<std::vector<double>> coef(9, std::vector<double>(n * n, 0.0));
  coef[(0 + 1) * 3 + (-1 + 1)].assign(n * n, 1.0);  // pick x(i-1, j)
  Stencil9View s;
  s.n = n;
  for (int k = 0; k < 9; ++k) s.coef[k] = coef[k].data();
  std::vector<double> x(n * n), y(n * n);
  for (int i = 0; i < n * n; ++i) x[i] = i;
  stencil9_apply(s, x, y);
  CHECK(y[0] == x[3]);   // i = 0 reads i = n-1
  CHECK(y[5] == x[4]);
}
