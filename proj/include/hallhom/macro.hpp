#pragma once

// Fine-scale and homogenized Dirichlet problems on the unit cube with a
// columnar (x₃-independent) coefficient, discretized by trilinear elements.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hallhom/cell_solver.hpp"
#include "hallhom/geometry.hpp"
#include "hallhom/tensor.hpp"

namespace hallhom {

/// Elements per side; nodes are (nx+1)(ny+1)(nz+1) with the boundary fixed at 0.
struct GridDims {
  int nx = 0;
  int ny = 0;
  int nz = 0;

  std::size_t node_count() const {
    return static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1);
  }
  bool operator==(const GridDims&) const = default;
};

/// Largest admissible grid per side.
inline constexpr int kMaxMacroCells = 48;
/// Largest admissible α₂,ₙ/α₁ in macro runs.
inline constexpr double kMaxMacroContrast = 1e3;

/// f(x) = Px(x₁)·Py(x₂)·Pz(x₃); coefficients in ascending powers.
struct SeparablePolynomial {
  std::vector<double> px{1.0};
  std::vector<double> py{1.0};
  std::vector<double> pz{1.0};

  double operator()(Vec3 x) const;
  static double eval(const std::vector<double>& c, double t);
};

struct MacroProblem {
  /// Cell geometry repeated with period ε in x₁ and x₂.
  CellGeometry cell = CellGeometry::frame(0.25);
  Phases phases;
  double epsilon = 0.25;
  Vec3 h;
  SeparablePolynomial f;

  /// 1/ε must be an integer and the contrast at most kMaxMacroContrast.
  void validate() const;
  /// σₙ(h) at a transversal point.
  Mat3 sigma_at(Vec2 x) const;
};

struct MacroSettings {
  double rtol = 1e-11;
  int restart = 40;
  int max_iterations = 3000;
};

struct MacroSolution {
  GridDims dims;
  /// Nodal values, x fastest then y then z, boundary included.
  std::vector<double> u;
  double residual = 0.0;
  int iterations = 0;
  /// Bilinear form a(u, u) and load ∫ f u of the discrete solution.
  double energy = 0.0;
  double load = 0.0;

  double energy_defect() const;
  double at(int i, int j, int k) const {
    return u[(static_cast<std::size_t>(k) * (dims.ny + 1) + j) * (dims.nx + 1) + i];
  }
};

/// Coefficient of the element column whose transversal centroid is x.
using ColumnCoefficient = std::function<Mat3(Vec2 x)>;

/// Generic columnar solve; throws SolverError on non-convergence.
MacroSolution solve_columnar(const ColumnCoefficient& sigma, const SeparablePolynomial& f,
                             GridDims dims, const MacroSettings& settings = {});

/// Throws ValidationError unless the grid fits the period evenly and puts at
/// least two cells across every fibre or strut.
MacroSolution solve_fine(const MacroProblem& problem, GridDims dims,
                         const MacroSettings& settings = {});

MacroSolution solve_homogenized(const EffectiveTensor& sigma_star, const SeparablePolynomial& f,
                                GridDims dims, const MacroSettings& settings = {});
/// x′-dependent homogenized tensor (e.g. ρ-modulated closed forms).
MacroSolution solve_homogenized(const std::function<EffectiveTensor(Vec2)>& sigma_star,
                                const SeparablePolynomial& f, GridDims dims,
                                const MacroSettings& settings = {});

struct ErrorMetrics {
  double l2 = 0.0;
  double h1 = 0.0;
  double l2_relative = 0.0;
  double h1_relative = 0.0;
};

/// Relative errors of `a` against `b` from cell-centered values and gradients.
/// Grids must match or one must refine the other by an integer factor.
ErrorMetrics compare(const MacroSolution& a, const MacroSolution& b);

/// Three little-endian uint32 node counts, then little-endian doubles, x fastest.
void write_binary(std::ostream& out, const MacroSolution& sol);
MacroSolution read_binary(std::istream& in);
std::string metadata_json(const MacroSolution& sol, const std::string& label);

}  // namespace hallhom
