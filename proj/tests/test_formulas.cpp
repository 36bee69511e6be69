#include <doctest.h>

#include <cmath>
#include <random>

#include "hallhom/error.hpp"
#include "hallhom/formulas.hpp"

using namespace hallhom;

namespace {

Vec3 random_h(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  return {u(rng), u(rng), u(rng)};
}

LimitParams scaled(LimitParams p, double rho) {
  p.alpha2 *= rho;
  p.beta2 *= rho;
  return p;
}

}  // namespace

TEST_CASE("circular example") {
  const LimitParams p{1.0, 0.0, 2.0, 1.0, {0.0, 0.0, 1.0}};
  const Mat3 m = oracle_circular(p, 1.0).matrix();
  CHECK(m(2, 2) == doctest::Approx(3.0));
  CHECK(m(0, 0) == doctest::Approx(1.0));
  CHECK(m(0, 1) == 0.0);
}

TEST_CASE("grid example along the axis") {
  const LimitParams p{1.0, 0.0, 2.0, 1.0, {0.0, 0.0, 1.0}};
  const EffectiveTensor t = oracle_grid(p, 1.0);
  CHECK(max_abs_diff(t.transversal(), 2.25 * Mat2::identity()) < 1e-15);
  CHECK(t.corner() == doctest::Approx(3.0));
  CHECK(t.col3().x == 0.0);
  CHECK(t.row3().y == 0.0);
}

TEST_CASE("grid example across the axis") {
  const LimitParams p{1.0, 0.0, 2.0, 1.0, {1.0, 0.0, 0.0}};
  const EffectiveTensor t = oracle_grid(p, 1.0);
  CHECK(max_abs_diff(t.transversal(), 2.0 * Mat2::identity()) < 1e-15);
  CHECK(t.col3().x == doctest::Approx(0.0));
  CHECK(t.col3().y == doctest::Approx(-0.5));
  CHECK(t.row3().x == doctest::Approx(0.0));
  CHECK(t.row3().y == doctest::Approx(0.5));
  CHECK(t.corner() == doctest::Approx(3.25));
}

TEST_CASE("closed forms agree with the general assembly") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> a(0.05, 20.0), b(-5.0, 5.0), r(0.1, 4.0);
  for (int k = 0; k < 100; ++k) {
    const LimitParams p{a(rng), b(rng), a(rng), b(rng), random_h(rng)};
    const double rho = r(rng);
    const LimitParams local = scaled(p, rho);
    const Mat3 c = assemble_effective(transversal_limit(sigma0_circular, local), rho, p).matrix();
    const Mat3 g = assemble_effective(transversal_limit(sigma0_grid, local), rho, p).matrix();
    CAPTURE(k);
    CHECK(max_abs_diff(c, oracle_circular(p, rho).matrix()) < 1e-11 * c.max_abs());
    CHECK(max_abs_diff(g, oracle_grid(p, rho).matrix()) < 1e-11 * g.max_abs());
  }
}

TEST_CASE("reversing the field transposes the limit") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> a(0.1, 5.0), b(-2.0, 2.0);
  for (int k = 0; k < 20; ++k) {
    LimitParams p{a(rng), b(rng), a(rng), b(rng), random_h(rng)};
    LimitParams q = p;
    q.h = -1.0 * p.h;
    for (auto* fn : {&oracle_circular, &oracle_grid}) {
      const Mat3 m = (*fn)(p, 1.3).matrix();
      const Mat3 mt = (*fn)(q, 1.3).matrix();
      CHECK(max_abs_diff(mt, m.transposed()) < 1e-12 * m.max_abs());
    }
  }
}

TEST_CASE("limits are affine in the density") {
  const LimitParams p{1.5, 0.4, 3.0, -1.2, {0.3, 0.9, -0.7}};
  for (auto* fn : {&oracle_circular, &oracle_grid}) {
    const Mat3 a = (*fn)(p, 0.5).matrix();
    const Mat3 b = (*fn)(p, 1.0).matrix();
    const Mat3 c = (*fn)(p, 1.5).matrix();
    CHECK((a + c - 2.0 * b).max_abs() < 1e-12 * b.max_abs());
  }
}

TEST_CASE("grid off-diagonal columns") {
  const LimitParams p{1.0, 0.7, 2.0, 1.5, {0.4, -0.8, 1.1}};
  const EffectiveTensor t = oracle_grid(p, 1.0);
  const Vec2 sum = t.col3() + t.row3();
  // p* + q* is parallel to h̃ and p* − q* to Jh̃.
  CHECK(sum.x * p.h.y - sum.y * p.h.x == doctest::Approx(0.0));
  const Vec2 diff = t.col3() - t.row3();
  CHECK(dot(diff, p.h.transversal()) == doctest::Approx(0.0));

  LimitParams zero = p;
  zero.h = {};
  const EffectiveTensor z = oracle_grid(zero, 1.0);
  CHECK(z.col3().x == 0.0);
  CHECK(z.row3().y == 0.0);
  CHECK(max_abs_diff(z.matrix(), z.matrix().transposed()) == 0.0);
}

TEST_CASE("no Hall terms gives the isotropic limits") {
  const LimitParams p{1.0, 0.0, 4.0, 0.0, {1.0, 2.0, 3.0}};
  CHECK(oracle_circular(p, 1.0).corner() == doctest::Approx(5.0));
  CHECK(oracle_grid(p, 1.0).transversal()(0, 0) == doctest::Approx(3.0));
  CHECK(max_abs_diff(transversal_limit(sigma0_grid, p), 3.0 * Mat2::identity()) < 1e-15);
}

TEST_CASE("invalid parameters") {
  LimitParams p{1.0, 0.0, 0.0, 1.0, {1.0, 0.0, 0.0}};
  CHECK_THROWS_AS(oracle_grid(p, 1.0), ValidationError);
  CHECK_THROWS_AS(transversal_limit(sigma0_circular, p), ValidationError);
  p.alpha2 = 1.0;
  CHECK_THROWS_AS(oracle_circular(p, 0.0), ValidationError);
  CHECK_THROWS_AS(assemble_effective(Mat2::identity(), -1.0, p), ValidationError);
  p.h.y = INFINITY;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}
