#pragma once

// Small dense algebra for Hall-perturbed conductivities.
//
// Conventions: E(h)x = h × x, J is rotation by +π/2 in the transversal
// (x1, x2) plane, and for a 3×3 matrix the "transversal block" is its
// top-left 2×2 corner. All matrices are row-major value types.

#include <array>
#include <cstddef>
#include <iosfwd>

namespace hallhom {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : y; }
  constexpr double& operator[](std::size_t i) { return i == 0 ? x : y; }
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }

  /// First two components (the transversal projection).
  constexpr Vec2 transversal() const { return {x, y}; }
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double norm(Vec3 a);

struct Mat2 {
  std::array<double, 4> a{};

  constexpr double operator()(std::size_t i, std::size_t j) const { return a[2 * i + j]; }
  constexpr double& operator()(std::size_t i, std::size_t j) { return a[2 * i + j]; }

  static constexpr Mat2 identity() { return Mat2{{1.0, 0.0, 0.0, 1.0}}; }
  static constexpr Mat2 zero() { return Mat2{}; }
  /// J = [[0, -1], [1, 0]].
  static constexpr Mat2 rotation() { return Mat2{{0.0, -1.0, 1.0, 0.0}}; }

  constexpr Mat2 transposed() const { return Mat2{{a[0], a[2], a[1], a[3]}}; }
  constexpr double determinant() const { return a[0] * a[3] - a[1] * a[2]; }
  double max_abs() const;
  /// Throws DegenerateError when |det| < threshold · max_abs².
  Mat2 inverse() const;
  constexpr Mat2 symmetric_part() const {
    const double off = 0.5 * (a[1] + a[2]);
    return Mat2{{a[0], off, off, a[3]}};
  }
  /// Eigenvalues of the symmetric part, ascending.
  std::array<double, 2> symmetric_eigenvalues() const;
};

constexpr Mat2 operator+(const Mat2& l, const Mat2& r) {
  return Mat2{{l.a[0] + r.a[0], l.a[1] + r.a[1], l.a[2] + r.a[2], l.a[3] + r.a[3]}};
}
constexpr Mat2 operator-(const Mat2& l, const Mat2& r) {
  return Mat2{{l.a[0] - r.a[0], l.a[1] - r.a[1], l.a[2] - r.a[2], l.a[3] - r.a[3]}};
}
constexpr Mat2 operator*(double s, const Mat2& m) {
  return Mat2{{s * m.a[0], s * m.a[1], s * m.a[2], s * m.a[3]}};
}
constexpr Mat2 operator*(const Mat2& l, const Mat2& r) {
  return Mat2{{l.a[0] * r.a[0] + l.a[1] * r.a[2], l.a[0] * r.a[1] + l.a[1] * r.a[3],
               l.a[2] * r.a[0] + l.a[3] * r.a[2], l.a[2] * r.a[1] + l.a[3] * r.a[3]}};
}
constexpr Vec2 operator*(const Mat2& m, Vec2 v) {
  return {m.a[0] * v.x + m.a[1] * v.y, m.a[2] * v.x + m.a[3] * v.y};
}

struct Mat3 {
  std::array<double, 9> a{};

  constexpr double operator()(std::size_t i, std::size_t j) const { return a[3 * i + j]; }
  constexpr double& operator()(std::size_t i, std::size_t j) { return a[3 * i + j]; }

  static constexpr Mat3 identity() { return Mat3{{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }
  static constexpr Mat3 zero() { return Mat3{}; }

  constexpr Mat3 transposed() const {
    return Mat3{{a[0], a[3], a[6], a[1], a[4], a[7], a[2], a[5], a[8]}};
  }
  constexpr double determinant() const {
    return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
           a[2] * (a[3] * a[7] - a[4] * a[6]);
  }
  double max_abs() const;
  /// Throws DegenerateError when |det| < threshold · max_abs².
  Mat3 inverse() const;
  Mat3 symmetric_part() const;
  /// Smallest eigenvalue of the symmetric part.
  double min_symmetric_eigenvalue() const;
};

Mat3 operator+(const Mat3& l, const Mat3& r);
Mat3 operator-(const Mat3& l, const Mat3& r);
Mat3 operator*(double s, const Mat3& m);
Mat3 operator*(const Mat3& l, const Mat3& r);
Vec3 operator*(const Mat3& m, Vec3 v);

/// Relative |det| threshold below which inversion is refused.
inline constexpr double kSingularityThreshold = 1e-14;

/// Largest entrywise absolute difference.
double max_abs_diff(const Mat2& l, const Mat2& r);
double max_abs_diff(const Mat3& l, const Mat3& r);

/// The antisymmetric matrix with E(h)x = h × x.
constexpr Mat3 hall_matrix(Vec3 h) {
  return Mat3{{0.0, -h.z, h.y, h.z, 0.0, -h.x, -h.y, h.x, 0.0}};
}

/// Top-left 2×2 block.
constexpr Mat2 transversal_block(const Mat3& s) { return Mat2{{s.a[0], s.a[1], s.a[3], s.a[4]}}; }

/// One isotropic phase under a magnetic field: σ(h) = αI₃ + βE(h).
class PerturbedConductivity {
 public:
  /// Throws ValidationError unless alpha > 0 and all inputs are finite.
  PerturbedConductivity(double alpha, double beta, Vec3 h);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  Vec3 field() const noexcept { return h_; }

 private:
  double alpha_;
  double beta_;
  Vec3 h_;
};

Mat3 realize_sigma(const PerturbedConductivity& p);

/// σ̃ = αI₂ + βh₃J. Always has equal diagonal entries and opposite off-diagonals.
class TransversalBlock {
 public:
  TransversalBlock(double alpha, double beta_h3) : alpha_(alpha), beta_h3_(beta_h3) {}
  static TransversalBlock of(double alpha, double beta, Vec3 h) { return {alpha, beta * h.z}; }

  double alpha() const noexcept { return alpha_; }
  /// β·h₃, the coefficient of J.
  double skew() const noexcept { return beta_h3_; }
  Mat2 matrix() const { return Mat2{{alpha_, -beta_h3_, beta_h3_, alpha_}}; }

 private:
  double alpha_;
  double beta_h3_;
};

/// Parameters of the block-triangular conjugation σ ↦ Π σ Π̂ with
/// Π = [[I₂, 0], [q₀ᵀ, 1]] and Π̂ = [[I₂, p₀], [0, 1]].
struct PiPair {
  Vec2 p0;
  Vec2 q0;

  Mat3 pi() const;
  Mat3 pi_hat() const;
  Mat3 pi_inverse() const;
  Mat3 pi_hat_inverse() const;
};

/// Choose p₀, q₀ so that the transformed off-diagonal blocks coincide in both
/// phases. Throws DegenerateError when σ̃₂ − σ̃₁ is singular.
PiPair interface_match(const TransversalBlock& sig1, const TransversalBlock& sig2n, double beta1,
                       double beta2n, Vec3 h);

/// Limits of the matching parameters as the inclusion volume vanishes:
/// p₀ = β₂σ̃₂⁻¹Jh̃ and q₀ = −β₂σ̃₂⁻ᵀJh̃.
PiPair pi_limits(double alpha2, double beta2, Vec3 h);

Mat3 pi_conjugate(const Mat3& sigma, const PiPair& pair);
Mat3 pi_deconjugate(const Mat3& sigma_prime, const PiPair& pair);

/// 3×3 effective conductivity viewed as [[σ̃*, p*], [q*ᵀ, α*]].
class EffectiveTensor {
 public:
  EffectiveTensor() = default;
  explicit EffectiveTensor(const Mat3& m) : m_(m) {}
  EffectiveTensor(const Mat2& transversal, Vec2 col3, Vec2 row3, double corner);

  const Mat3& matrix() const noexcept { return m_; }
  Mat2 transversal() const { return transversal_block(m_); }
  Vec2 col3() const { return {m_(0, 2), m_(1, 2)}; }
  Vec2 row3() const { return {m_(2, 0), m_(2, 1)}; }
  double corner() const { return m_(2, 2); }

 private:
  Mat3 m_{};
};

std::ostream& operator<<(std::ostream& os, const Mat2& m);
std::ostream& operator<<(std::ostream& os, const Mat3& m);

}  // namespace hallhom
