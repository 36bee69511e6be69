#pragma once

// Q1 (bi/trilinear) element algebra on uniform boxes and the periodic 2D cell
// operator. Element coefficients are constant per element; all element
// integrals are exact (tensor products of 1D mass/derivative integrals).

#include <array>
#include <span>
#include <vector>

#include "hallhom/geometry.hpp"
#include "hallhom/kernels/kernels.hpp"
#include "hallhom/sparse_factor.hpp"
#include "hallhom/tensor.hpp"

namespace hallhom::fem {

/// Local node a of a 2D element sits at (a & 1, a >> 1); for 3D add (a >> 2) & 1 in z.
using ElementMatrix2 = std::array<double, 16>;
using ElementMatrix3 = std::array<double, 64>;

/// K_ab = ∫ A∇φ_b·∇φ_a over an hx×hy element.
ElementMatrix2 stiffness_2d(const Mat2& a, double hx, double hy);
/// M_ab = w ∫ φ_a φ_b.
ElementMatrix2 mass_2d(double w, double hx, double hy);
/// ∫ ∇φ_a over an hx×hy element.
std::array<Vec2, 4> gradient_integrals_2d(double hx, double hy);

ElementMatrix3 stiffness_3d(const Mat3& a, double hx, double hy, double hz);

/// Constant-per-element coefficient of a two-phase cell: phase 1 outside, phase 2 inside.
struct TwoPhaseCoefficient {
  Mat2 matrix_phase;
  Mat2 inclusion_phase;

  const Mat2& at(const PhaseField& f, int i, int j) const {
    return f.inclusion(i, j) ? inclusion_phase : matrix_phase;
  }
};

/// Assembled 9-point operator on the periodic N×N node grid of the unit cell.
/// Nodes sit at the corners of the raster cells, so element (i, j) is raster
/// cell (i, j) with nodes (i..i+1, j..j+1) wrapped.
class PeriodicOperator {
 public:
  PeriodicOperator(const PhaseField& field, const TwoPhaseCoefficient& coef);
  /// Scalar weighted mass matrix with weight w₁ outside, w₂ inside.
  static PeriodicOperator mass(const PhaseField& field, double w1, double w2);

  int resolution() const noexcept { return n_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }
  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> diagonal() const;
  kernels::Stencil9View view() const;
  /// Coefficient for node `node` and offset (di, dj).
  double coefficient(std::size_t node, int di, int dj) const {
    return coef_[(dj + 1) * 3 + (di + 1)][node];
  }
  /// Assembled entries as (row, col, value); duplicates are not merged.
  std::vector<Triplet> triplets() const;

 private:
  explicit PeriodicOperator(int n);
  void scatter(int i, int j, const ElementMatrix2& k);

  int n_;
  std::array<std::vector<double>, 9> coef_;
};

/// Right-hand side −∫ A λ·∇φ_a of the corrector equation for the affine part λ·y.
std::vector<double> affine_load(const PhaseField& field, const TwoPhaseCoefficient& coef, Vec2 lambda);
/// Right-hand side ∫ v·∇φ_a for an elementwise-constant vector field v (phase values).
std::vector<double> flux_source_load(const PhaseField& field, Vec2 v_matrix, Vec2 v_inclusion);
/// Mean gradient of a nodal field over element (i, j).
Vec2 element_gradient(std::span<const double> w, int n, int i, int j);

}  // namespace hallhom::fem
