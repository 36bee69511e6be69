#include "hallhom/formulas.hpp"

#include <cmath>

#include "hallhom/error.hpp"

namespace hallhom {

void LimitParams::validate() const {
  for (double v : {alpha1, beta1, alpha2, beta2, h.x, h.y, h.z})
    if (!std::isfinite(v)) throw ValidationError("limit parameters must be finite");
  if (!(alpha1 > 0.0)) throw ValidationError("alpha1 must be positive");
  if (!(alpha2 > 0.0)) throw ValidationError("alpha2 must be positive");
}

Mat2 sigma0_circular(double a1, double /*a2*/) { return a1 * Mat2::identity(); }

Mat2 sigma0_grid(double a1, double a2) { return (a1 + 0.5 * a2) * Mat2::identity(); }

EffectiveTensor assemble_effective(const Mat2& sigma_t_star, double theta, const LimitParams& p) {
  p.validate();
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw ValidationError("theta must be >= 0");
  const Mat2 s1 = p.sigma1().matrix();
  const Mat2 s2 = p.sigma2().matrix();
  const Mat2 s2inv = s2.inverse();
  const Mat2 id = Mat2::identity();
  const Vec2 jh = Mat2::rotation() * p.h.transversal();
  const Mat2 d = sigma_t_star - s1;

  const Vec2 col3 = -((p.beta1 * id + p.beta2 * (d * s2inv)) * jh);
  const Vec2 row3 = (p.beta1 * id + p.beta2 * (s2inv * d)).transposed() * jh;
  const Mat2 mid = s2inv * ((s1 + theta * s2 - sigma_t_star) * s2inv);
  const double corner = p.alpha1 + theta * p.alpha2 + p.beta2 * p.beta2 * dot(mid * jh, jh);
  return EffectiveTensor(sigma_t_star, col3, row3, corner);
}

Mat2 transversal_limit(const Sigma0Fn& sigma0_star, const LimitParams& p) {
  p.validate();
  const double h3 = p.h.z;
  const double shifted = p.alpha2 + p.beta2 * p.beta2 * h3 * h3 / p.alpha2;
  return sigma0_star(p.alpha1, shifted) + (h3 * p.beta1) * Mat2::rotation();
}

EffectiveTensor oracle_circular(const LimitParams& p, double rho) {
  p.validate();
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  const double a2 = p.alpha2;
  const double b2 = p.beta2;
  const double hh = dot(p.h, p.h);
  const double h3 = p.h.z;
  const double coef = (a2 * a2 * a2 + a2 * b2 * b2 * hh) / (a2 * a2 + b2 * b2 * h3 * h3);
  Mat3 m = p.alpha1 * Mat3::identity() + p.beta1 * hall_matrix(p.h);
  m(2, 2) += rho * coef;
  return EffectiveTensor(m);
}

EffectiveTensor oracle_grid(const LimitParams& p, double rho) {
  p.validate();
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  const double a2 = p.alpha2;
  const double b2 = p.beta2;
  const double h3 = p.h.z;
  const Vec2 ht = p.h.transversal();
  const Vec2 jh = Mat2::rotation() * ht;

  const Mat2 st = (p.alpha1 + rho * (a2 * a2 + b2 * b2 * h3 * h3) / (2.0 * a2)) * Mat2::identity() +
                  (p.beta1 * h3) * Mat2::rotation();
  const double hall = p.beta1 + 0.5 * rho * b2;
  const double along = rho * b2 * b2 * h3 / (2.0 * a2);
  // Sign of the h̃ terms follows from assemble_effective with the grid σ̃*.
  const Vec2 col3 = -(hall * jh) - along * ht;
  const Vec2 row3 = hall * jh - along * ht;
  const double corner = p.alpha1 + rho * a2 + rho * b2 * b2 * dot(ht, ht) / (2.0 * a2);
  return EffectiveTensor(st, col3, row3, corner);
}

}  // namespace hallhom
