#pragma once

// Closed-form limit tensors of high-contrast Hall composites.

#include <functional>

#include "hallhom/tensor.hpp"

namespace hallhom {

/// Matrix phase (α₁, β₁), rescaled inclusion limit (α₂, β₂) and field h.
struct LimitParams {
  double alpha1 = 1.0;
  double beta1 = 0.0;
  double alpha2 = 1.0;
  double beta2 = 0.0;
  Vec3 h;

  /// Throws ValidationError unless α₁, α₂ > 0 and every value is finite.
  void validate() const;
  TransversalBlock sigma1() const { return TransversalBlock::of(alpha1, beta1, h); }
  TransversalBlock sigma2() const { return TransversalBlock::of(alpha2, beta2, h); }
};

/// σ*⁰(a₁, a₂): homogenized transversal tensor of the Hall-free problem.
using Sigma0Fn = std::function<Mat2(double a1, double a2)>;

/// a₁I₂ (thin circular fibres).
Mat2 sigma0_circular(double a1, double a2);
/// (a₁ + a₂/2)I₂ (thin square frame).
Mat2 sigma0_grid(double a1, double a2);

/// Full tensor from its transversal block σ̃* and the density θ ≥ 0.
/// Throws DegenerateError when σ̃₂ is singular.
EffectiveTensor assemble_effective(const Mat2& sigma_t_star, double theta, const LimitParams& p);

/// σ̃* = σ*⁰(α₁, α₂ + β₂²h₃²/α₂) + h₃β₁J.
Mat2 transversal_limit(const Sigma0Fn& sigma0_star, const LimitParams& p);

/// α₁I₃ + ρ(α₂³ + α₂β₂²|h|²)/(α₂² + β₂²h₃²) e₃⊗e₃ + β₁E(h).
EffectiveTensor oracle_circular(const LimitParams& p, double rho);

/// Explicit limit of the thin-frame construction.
EffectiveTensor oracle_grid(const LimitParams& p, double rho);

}  // namespace hallhom
