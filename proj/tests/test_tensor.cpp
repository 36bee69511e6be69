#include <doctest.h>

#include <random>

#include "hallhom/error.hpp"
#include "hallhom/tensor.hpp"

using namespace hallhom;

namespace {

bool mat_near(const Mat3& a, const Mat3& b, double tol) { return max_abs_diff(a, b) <= tol; }

}  // namespace

TEST_CASE("hall_matrix for h = e3") {
  const Mat3 e = hall_matrix({0, 0, 1});
  CHECK(mat_near(e, Mat3{{0, -1, 0, 1, 0, 0, 0, 0, 0}}, 0.0));
  CHECK(mat_near(hall_matrix({0, 0, 0}), Mat3::zero(), 0.0));
}

TEST_CASE("hall_matrix reproduces the cross product") {
  const Vec3 y = hall_matrix({1, 2, 3}) * Vec3{4, 5, 6};
  CHECK(y.x == doctest::Approx(-3.0));
  CHECK(y.y == doctest::Approx(6.0));
  CHECK(y.z == doctest::Approx(-3.0));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int k = 0; k < 100; ++k) {
    const Vec3 h{u(rng), u(rng), u(rng)}, x{u(rng), u(rng), u(rng)};
    const Mat3 e = hall_matrix(h);
    CHECK(mat_near(e.transposed(), -1.0 * e, 0.0));
    CHECK(std::abs(dot(e * x, x)) <= 1e-12);
  }
}

TEST_CASE("realize_sigma examples") {
  CHECK(mat_near(realize_sigma(PerturbedConductivity(1, 0, {3, -1, 2})), Mat3::identity(), 0.0));
  CHECK(mat_near(realize_sigma(PerturbedConductivity(1, 0.5, {0, 0, 1})),
                 Mat3{{1, -0.5, 0, 0.5, 1, 0, 0, 0, 1}}, 1e-15));
  CHECK(mat_near(realize_sigma(PerturbedConductivity(2, 1, {1, 0, 0})),
                 Mat3{{2, 0, 0, 0, 2, -1, 0, 1, 2}}, 1e-15));
  CHECK_THROWS_AS(PerturbedConductivity(0.0, 1, {0, 0, 1}), ValidationError);
  CHECK_THROWS_AS(PerturbedConductivity(-1.0, 1, {0, 0, 1}), ValidationError);
  CHECK_THROWS_AS(PerturbedConductivity(1.0, std::nan(""), {0, 0, 1}), ValidationError);
}

TEST_CASE("symmetric part of sigma is alpha I") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> a(0.01, 50), u(-5, 5);
  for (int k = 0; k < 100; ++k) {
    const double alpha = a(rng);
    const Vec3 h{u(rng), u(rng), u(rng)}, xi{u(rng), u(rng), u(rng)};
    const Mat3 s = realize_sigma(PerturbedConductivity(alpha, u(rng), h));
    CHECK(mat_near(s.symmetric_part(), alpha * Mat3::identity(), 1e-13));
    CHECK(dot(s * xi, xi) == doctest::Approx(alpha * dot(xi, xi)).epsilon(1e-12));
  }
}

TEST_CASE("transversal block examples") {
  const Mat2 t = transversal_block(realize_sigma(PerturbedConductivity(1, 0.5, {0, 0, 1})));
  CHECK(max_abs_diff(t, Mat2{{1, -0.5, 0.5, 1}}) == 0.0);
  CHECK(max_abs_diff(transversal_block(Mat3::identity()), Mat2::identity()) == 0.0);
  CHECK(max_abs_diff(transversal_block(Mat3::zero()), Mat2::zero()) == 0.0);

  const TransversalBlock b = TransversalBlock::of(3.0, 2.0, {1, 1, 0.5});
  const Mat2 m = b.matrix();
  CHECK(m(0, 0) == m(1, 1));
  CHECK(m(1, 0) == -m(0, 1));
  CHECK(max_abs_diff(m, transversal_block(realize_sigma(PerturbedConductivity(3, 2, {1, 1, 0.5})))) ==
        0.0);
}

TEST_CASE("inversion refuses near-singular matrices") {
  const Mat2 s2{{1, 2, 2, 4}};
  const Mat3 s3{{1, 2, 3, 2, 4, 6, 0, 0, 1}};
  CHECK_THROWS_AS(s2.inverse(), DegenerateError);
  CHECK_THROWS_AS(s3.inverse(), DegenerateError);
  CHECK_THROWS_AS(Mat2::zero().inverse(), DegenerateError);
  const Mat2 a{{2, -1, 1, 3}};
  CHECK(max_abs_diff(a * a.inverse(), Mat2::identity()) < 1e-15);
  const Mat3 b{{4, 1, 0, -1, 3, 2, 0.5, 0, 2}};
  CHECK(max_abs_diff(b * b.inverse(), Mat3::identity()) < 1e-14);
}

TEST_CASE("interface_match trivial cases") {
  const Vec3 h{1, -2, 0.5};
  const PiPair same = interface_match(TransversalBlock::of(1, 0.3, h), TransversalBlock::of(5, 0.3, h),
                                      0.3, 0.3, h);
  CHECK(same.p0.x == 0.0);
  CHECK(same.p0.y == 0.0);
  CHECK(same.q0.x == 0.0);
  CHECK(same.q0.y == 0.0);

  const Vec3 axial{0, 0, 2};
  const PiPair along = interface_match(TransversalBlock::of(1, 0.3, axial),
                                       TransversalBlock::of(5, 4, axial), 0.3, 4, axial);
  CHECK(along.p0.x == 0.0);
  CHECK(along.q0.y == 0.0);
}

TEST_CASE("interface_match makes off-blocks phase independent") {
  const Vec3 h{1, 0, 0};
  const TransversalBlock s1 = TransversalBlock::of(1, 0, h), s2 = TransversalBlock::of(101, 50, h);
  const PiPair pair = interface_match(s1, s2, 0, 50, h);
  CHECK(pair.p0.x == doctest::Approx(0.0));
  CHECK(pair.p0.y == doctest::Approx(0.5));
  CHECK(pair.q0.x == doctest::Approx(0.0));
  CHECK(pair.q0.y == doctest::Approx(-0.5));

  const Mat3 c1 = pi_conjugate(realize_sigma(PerturbedConductivity(1, 0, h)), pair);
  const Mat3 c2 = pi_conjugate(realize_sigma(PerturbedConductivity(101, 50, h)), pair);
  for (int idx : {2, 5, 6, 7}) CHECK(c1.a[idx] == doctest::Approx(c2.a[idx]).epsilon(1e-13));
  // The transversal block is untouched by the conjugation.
  CHECK(max_abs_diff(transversal_block(c2), s2.matrix()) < 1e-14);
}

TEST_CASE("interface_match rejects coinciding transversal blocks") {
  const Vec3 h{1, 1, 0};
  CHECK_THROWS_AS(interface_match(TransversalBlock::of(2, 1, h), TransversalBlock::of(2, 1, h), 1, 3, h),
                  DegenerateError);
}

TEST_CASE("pi_limits examples") {
  const PiPair zero_beta = pi_limits(3, 0, {1, 2, 3});
  CHECK(mat_near(zero_beta.pi(), Mat3::identity(), 0.0));
  CHECK(mat_near(zero_beta.pi_hat(), Mat3::identity(), 0.0));
  const PiPair axial = pi_limits(3, 2, {0, 0, 1});
  CHECK(mat_near(axial.pi(), Mat3::identity(), 0.0));

  const PiPair p = pi_limits(2, 1, {1, 0, 0});
  CHECK(p.p0.x == doctest::Approx(0.0));
  CHECK(p.p0.y == doctest::Approx(0.5));
  CHECK(p.q0.y == doctest::Approx(-0.5));
  CHECK_THROWS_AS(pi_limits(0, 1, {1, 0, 0}), ValidationError);
}

TEST_CASE("pi matrices are unit block-triangular and round-trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 100; ++k) {
    const PiPair pair{{u(rng), u(rng)}, {u(rng), u(rng)}};
    CHECK(pair.pi().determinant() == doctest::Approx(1.0));
    CHECK(pair.pi_hat().determinant() == doctest::Approx(1.0));
    CHECK(max_abs_diff(transversal_block(pair.pi()), Mat2::identity()) == 0.0);
    CHECK(max_abs_diff(transversal_block(pair.pi_hat()), Mat2::identity()) == 0.0);
    CHECK(mat_near(pair.pi() * pair.pi_inverse(), Mat3::identity(), 1e-14));
    CHECK(mat_near(pair.pi_hat() * pair.pi_hat_inverse(), Mat3::identity(), 1e-14));
    Mat3 s;
    for (double& v : s.a) v = u(rng);
    CHECK(mat_near(pi_deconjugate(pi_conjugate(s, pair), pair), s, 1e-12));
    const double d = s.determinant();
    if (std::abs(d) > 1e-6) CHECK((pi_conjugate(s, pair).determinant() > 0) == (d > 0));
  }
  const Mat3 s{{1, 2, 3, 4, 5, 6, 7, 8, 10}};
  CHECK(mat_near(pi_conjugate(s, PiPair{}), s, 0.0));
}

TEST_CASE("effective tensor accessors partition the matrix") {
  const Mat3 m{{1.5, -0.25, 0.125, 0.75, 2.5, -3.0, 0.1, 0.2, 9.0}};
  const EffectiveTensor t(m);
  const EffectiveTensor back(t.transversal(), t.col3(), t.row3(), t.corner());
  for (int i = 0; i < 9; ++i) CHECK(back.matrix().a[i] == m.a[i]);
  CHECK(t.col3().x == 0.125);
  CHECK(t.row3().y == 0.2);
  CHECK(t.corner() == 9.0);
}

TEST_CASE("smallest symmetric eigenvalue") {
  CHECK(Mat3{{3, 0, 0, 0, 1, 0, 0, 0, 2}}.min_symmetric_eigenvalue() == doctest::Approx(1.0));
  // Antisymmetric parts do not contribute.
  const Mat3 s = realize_sigma(PerturbedConductivity(0.7, 5, {1, -2, 3}));
  CHECK(s.min_symmetric_eigenvalue() == doctest::Approx(0.7));
  const Mat2 m{{2, 1, 1, 2}};
  CHECK(m.symmetric_eigenvalues()[0] == doctest::Approx(1.0));
  CHECK(m.symmetric_eigenvalues()[1] == doctest::Approx(3.0));
}
