#pragma once

// Periodic cell problems of a columnar two-phase Hall medium and the 3×3
// homogenized tensor assembled from them.
//
// Only transversal (2D) solves are ever performed. For λ ⊥ e₃ the corrector
// does not depend on y₃; for λ = e₃ it is y₃ + w(y₁, y₂) where w solves
// div(Σ̃∇w) = div(b Jh̃) with b the Hall coefficient field.

#include <optional>
#include <vector>

#include "hallhom/fem.hpp"
#include "hallhom/geometry.hpp"
#include "hallhom/tensor.hpp"

namespace hallhom {

/// Phase parameters at one stage: σ₁(h) = α₁I + β₁E(h) outside the inclusion,
/// σ₂,ₙ(h) = α₂,ₙI + β₂,ₙE(h) inside.
struct Phases {
  double alpha1 = 1.0;
  double beta1 = 0.0;
  double alpha2n = 1.0;
  double beta2n = 0.0;

  /// Throws ValidationError unless both alphas are positive and all values finite.
  void validate() const;
  TransversalBlock matrix_block(Vec3 h) const { return TransversalBlock::of(alpha1, beta1, h); }
  TransversalBlock inclusion_block(Vec3 h) const {
    return TransversalBlock::of(alpha2n, beta2n, h);
  }
  Mat3 matrix_sigma(Vec3 h) const;
  Mat3 inclusion_sigma(Vec3 h) const;
};

struct SolverSettings {
  double rtol = 1e-10;
  int restart = 50;
  /// 0 selects 20·N.
  int max_iterations = 0;
  /// Retry with a symmetric-part preconditioner when Jacobi runs out of budget.
  bool allow_fallback = true;
  /// Worker threads for independent solves (<= 0: hardware concurrency).
  int parallelism = 1;
};

struct SolveStats {
  double residual = 0.0;
  int iterations = 0;
  bool used_fallback = false;
};

struct CellSolution {
  int resolution = 0;
  /// Mean-zero periodic nodal values of the corrector fluctuation.
  std::vector<double> w;
  /// Affine part λ (zero for the e₃ problem).
  Vec2 lambda;
  bool axial = false;
  /// Transversal averaged flux; for the e₃ problem this already includes −⟨b⟩Jh̃.
  Vec2 flux;
  /// Third flux component; only set for the e₃ problem.
  std::optional<double> axial_flux;
  SolveStats stats;
};

/// ⟨Σ̃(∇̃W + λ)·∇̃Φ⟩ = 0 for all periodic Φ, ⟨W⟩ = 0.
CellSolution solve_cell(const PhaseField& field, const TransversalBlock& sig1,
                        const TransversalBlock& sig2n, Vec2 lambda,
                        const SolverSettings& settings = {});
/// Same problem with arbitrary constant 2×2 phase matrices.
CellSolution solve_cell(const PhaseField& field, const fem::TwoPhaseCoefficient& coef, Vec2 lambda,
                        const SolverSettings& settings = {});

/// Reduced axial problem div(Σ̃∇̃w) = div(bJh̃).
CellSolution solve_cell_e3(const PhaseField& field, const Phases& phases, Vec3 h,
                           const SolverSettings& settings = {});

/// Phase average ⟨c(∇̃W + λ)⟩ of a scalar elementwise coefficient c.
Vec2 weighted_gradient_mean(const PhaseField& field, const CellSolution& sol, double c_matrix,
                            double c_inclusion);

/// Average of a two-valued field weighted by the raster fraction.
double phase_average(const PhaseField& field, double v_matrix, double v_inclusion);

/// Homogenized 2×2 tensor of arbitrary constant phase matrices (columns are
/// the fluxes for λ = e₁, e₂).
Mat2 homogenize_transversal(const PhaseField& field, const fem::TwoPhaseCoefficient& coef,
                            const SolverSettings& settings = {}, SolveStats* stats = nullptr);

struct HomogenizedPair {
  enum class Route { direct, pi };

  Mat2 sigma2d;
  EffectiveTensor sigma3d;
  Route route = Route::direct;
  /// Matching parameters used by the Π route.
  std::optional<PiPair> pi_pair;
  int iterations = 0;
  double max_residual = 0.0;
  bool used_fallback = false;
};

/// Full 3×3 tensor from the three cell problems. Throws SolverError when the
/// symmetric part of the transversal block falls below min(α₁, α₂,ₙ).
HomogenizedPair homogenize(const PhaseField& field, const Phases& phases, Vec3 h,
                           const SolverSettings& settings = {});

/// Full 3×3 tensor through the block-triangular conjugation: only the
/// transversal block is computed from cell problems; the third row and
/// column of the conjugated problem are phase-constant.
HomogenizedPair homogenize_via_pi(const PhaseField& field, const Phases& phases, Vec3 h,
                                  const SolverSettings& settings = {});

struct PwEstimate {
  /// Best constant c in ∫a|V − ⟨V⟩|² ≤ c ∫a|∇V|² on the unit cell.
  double c_value = 0.0;
  /// ‖M v − c K v‖ / ‖M v‖ for the final iterate.
  double eigen_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct PwSettings {
  double tolerance = 1e-8;
  int max_iterations = 500;
};

/// Largest generalized eigenvalue of (a-weighted mass, a-weighted stiffness)
/// on mean-zero periodic fields, by power iteration on the inverted stiffness.
/// Throws SolverError when the iteration does not settle.
PwEstimate estimate_pw_constant(const PhaseField& field, double alpha1, double alpha2n,
                                const PwSettings& settings = {});

}  // namespace hallhom
