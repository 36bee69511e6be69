#include "hallhom/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hallhom/error.hpp"

namespace hallhom {

double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

double Mat2::max_abs() const {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

Mat2 Mat2::inverse() const {
  const double det = determinant();
  const double scale = max_abs();
  if (!(std::abs(det) >= kSingularityThreshold * scale * scale) || scale == 0.0) {
    std::ostringstream msg;
    msg << "singular 2x2 matrix (det=" << det << ")";
    throw DegenerateError(msg.str());
  }
  const double inv = 1.0 / det;
  return Mat2{{a[3] * inv, -a[1] * inv, -a[2] * inv, a[0] * inv}};
}

std::array<double, 2> Mat2::symmetric_eigenvalues() const {
  const Mat2 s = symmetric_part();
  const double mean = 0.5 * (s.a[0] + s.a[3]);
  const double half_diff = 0.5 * (s.a[0] - s.a[3]);
  const double radius = std::hypot(half_diff, s.a[1]);
  return {mean - radius, mean + radius};
}

double Mat3::max_abs() const {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

Mat3 Mat3::inverse() const {
  const double det = determinant();
  const double scale = max_abs();
  if (!(std::abs(det) >= kSingularityThreshold * scale * scale) || scale == 0.0) {
    std::ostringstream msg;
    msg << "singular 3x3 matrix (det=" << det << ")";
    throw DegenerateError(msg.str());
  }
  const double inv = 1.0 / det;
  const auto& m = a;
  return Mat3{{(m[4] * m[8] - m[5] * m[7]) * inv, (m[2] * m[7] - m[1] * m[8]) * inv,
               (m[1] * m[5] - m[2] * m[4]) * inv, (m[5] * m[6] - m[3] * m[8]) * inv,
               (m[0] * m[8] - m[2] * m[6]) * inv, (m[2] * m[3] - m[0] * m[5]) * inv,
               (m[3] * m[7] - m[4] * m[6]) * inv, (m[1] * m[6] - m[0] * m[7]) * inv,
               (m[0] * m[4] - m[1] * m[3]) * inv}};
}

Mat3 Mat3::symmetric_part() const { return 0.5 * (*this + transposed()); }

double Mat3::min_symmetric_eigenvalue() const {
  // Closed-form eigenvalues of a real symmetric 3×3 matrix (trigonometric form).
  const Mat3 s = symmetric_part();
  const double p1 = s(0, 1) * s(0, 1) + s(0, 2) * s(0, 2) + s(1, 2) * s(1, 2);
  const double q = (s(0, 0) + s(1, 1) + s(2, 2)) / 3.0;
  if (p1 == 0.0) return std::min({s(0, 0), s(1, 1), s(2, 2)});
  const double p2 = (s(0, 0) - q) * (s(0, 0) - q) + (s(1, 1) - q) * (s(1, 1) - q) +
                    (s(2, 2) - q) * (s(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const Mat3 b = (1.0 / p) * (s - q * Mat3::identity());
  const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  constexpr double kTwoThirdsPi = 2.0943951023931954923;
  // Smallest of q + 2p cos(phi + 2πk/3).
  return q + 2.0 * p * std::cos(phi + kTwoThirdsPi);
}

Mat3 operator+(const Mat3& l, const Mat3& r) {
  Mat3 out;
  for (std::size_t i = 0; i < 9; ++i) out.a[i] = l.a[i] + r.a[i];
  return out;
}

Mat3 operator-(const Mat3& l, const Mat3& r) {
  Mat3 out;
  for (std::size_t i = 0; i < 9; ++i) out.a[i] = l.a[i] - r.a[i];
  return out;
}

Mat3 operator*(double s, const Mat3& m) {
  Mat3 out;
  for (std::size_t i = 0; i < 9; ++i) out.a[i] = s * m.a[i];
  return out;
}

Mat3 operator*(const Mat3& l, const Mat3& r) {
  Mat3 out;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      out(i, j) = l(i, 0) * r(0, j) + l(i, 1) * r(1, j) + l(i, 2) * r(2, j);
  return out;
}

Vec3 operator*(const Mat3& m, Vec3 v) {
  return {m(0, 0) * v.x + m(0, 1) * v.y + m(0, 2) * v.z,
          m(1, 0) * v.x + m(1, 1) * v.y + m(1, 2) * v.z,
          m(2, 0) * v.x + m(2, 1) * v.y + m(2, 2) * v.z};
}

double max_abs_diff(const Mat2& l, const Mat2& r) { return (l - r).max_abs(); }
double max_abs_diff(const Mat3& l, const Mat3& r) { return (l - r).max_abs(); }

PerturbedConductivity::PerturbedConductivity(double alpha, double beta, Vec3 h)
    : alpha_(alpha), beta_(beta), h_(h) {
  if (!std::isfinite(alpha) || !(alpha > 0.0))
    throw ValidationError("conductivity alpha must be positive and finite");
  if (!std::isfinite(beta) || !std::isfinite(h.x) || !std::isfinite(h.y) || !std::isfinite(h.z))
    throw ValidationError("conductivity beta and field must be finite");
}

Mat3 realize_sigma(const PerturbedConductivity& p) {
  return p.alpha() * Mat3::identity() + p.beta() * hall_matrix(p.field());
}

namespace {

Vec2 rotated_field(Vec3 h) { return Mat2::rotation() * h.transversal(); }

}  // namespace

Mat3 PiPair::pi() const { return Mat3{{1, 0, 0, 0, 1, 0, q0.x, q0.y, 1}}; }
Mat3 PiPair::pi_hat() const { return Mat3{{1, 0, p0.x, 0, 1, p0.y, 0, 0, 1}}; }
Mat3 PiPair::pi_inverse() const { return Mat3{{1, 0, 0, 0, 1, 0, -q0.x, -q0.y, 1}}; }
Mat3 PiPair::pi_hat_inverse() const { return Mat3{{1, 0, -p0.x, 0, 1, -p0.y, 0, 0, 1}}; }

PiPair interface_match(const TransversalBlock& sig1, const TransversalBlock& sig2n, double beta1,
                       double beta2n, Vec3 h) {
  const Mat2 diff = sig2n.matrix() - sig1.matrix();
  const Mat2 diff_inv = diff.inverse();
  const Vec2 jh = rotated_field(h);
  const double dbeta = beta2n - beta1;
  // (σ̃₁ − σ̃₂)⁻ᵀ = −(σ̃₂ − σ̃₁)⁻ᵀ
  return PiPair{dbeta * (diff_inv * jh), -dbeta * (diff_inv.transposed() * jh)};
}

PiPair pi_limits(double alpha2, double beta2, Vec3 h) {
  if (!(alpha2 > 0.0)) throw ValidationError("pi_limits: alpha2 must be positive");
  const Mat2 inv = TransversalBlock::of(alpha2, beta2, h).matrix().inverse();
  const Vec2 jh = rotated_field(h);
  return PiPair{beta2 * (inv * jh), -beta2 * (inv.transposed() * jh)};
}

Mat3 pi_conjugate(const Mat3& sigma, const PiPair& pair) {
  return pair.pi() * sigma * pair.pi_hat();
}

Mat3 pi_deconjugate(const Mat3& sigma_prime, const PiPair& pair) {
  return pair.pi_inverse() * sigma_prime * pair.pi_hat_inverse();
}

EffectiveTensor::EffectiveTensor(const Mat2& transversal, Vec2 col3, Vec2 row3, double corner)
    : m_{{transversal(0, 0), transversal(0, 1), col3.x, transversal(1, 0), transversal(1, 1),
          col3.y, row3.x, row3.y, corner}} {}

std::ostream& operator<<(std::ostream& os, const Mat2& m) {
  return os << "[[" << m(0, 0) << ", " << m(0, 1) << "], [" << m(1, 0) << ", " << m(1, 1) << "]]";
}

std::ostream& operator<<(std::ostream& os, const Mat3& m) {
  os << "[";
  for (std::size_t i = 0; i < 3; ++i) {
    os << (i ? ", [" : "[") << m(i, 0) << ", " << m(i, 1) << ", " << m(i, 2) << "]";
  }
  return os << "]";
}

}  // namespace hallhom
