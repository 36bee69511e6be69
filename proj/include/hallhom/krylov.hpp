#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hallhom {

using ApplyFn = std::function<void(std::span<const double> in, std::span<double> out)>;
using ProjectFn = std::function<void(std::span<double>)>;

struct LinearOperator {
  std::size_t size = 0;
  ApplyFn apply;
};

struct KrylovOptions {
  double rtol = 1e-10;
  int max_iterations = 1000;
  int restart = 50;
  /// Optional projection applied to the right-hand side, every preconditioned
  /// direction and the final iterate (e.g. removal of the constant mode).
  ProjectFn project;
};

struct KrylovResult {
  bool converged = false;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi preconditioner z = r ⊘ diag.
ApplyFn jacobi_preconditioner(std::vector<double> diagonal);

/// Restarted flexible GMRES with right preconditioning; x holds the initial
/// guess on entry. The reported residual is the true residual ‖b − Ax‖/‖b‖.
KrylovResult fgmres(const LinearOperator& a, std::span<const double> b, std::span<double> x,
                    const ApplyFn& preconditioner, const KrylovOptions& options);

/// Preconditioned conjugate gradients for symmetric positive (semi)definite operators.
KrylovResult pcg(const LinearOperator& a, std::span<const double> b, std::span<double> x,
                 const ApplyFn& preconditioner, const KrylovOptions& options);

double norm2(std::span<const double> v);
/// v ← v − mean(v)
void remove_mean(std::span<double> v);

}  // namespace hallhom
