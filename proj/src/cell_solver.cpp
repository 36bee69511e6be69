#include "hallhom/cell_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "hallhom/error.hpp"
#include "hallhom/kernels/kernels.hpp"
#include "hallhom/krylov.hpp"
#include "hallhom/parallel.hpp"
#include "hallhom/sparse_factor.hpp"

namespace hallhom {

void Phases::validate() const {
  for (double v : {alpha1, beta1, alpha2n, beta2n})
    if (!std::isfinite(v)) throw ValidationError("phase parameters must be finite");
  if (!(alpha1 > 0.0) || !(alpha2n > 0.0))
    throw ValidationError("phase conductivities alpha1 and alpha2n must be positive");
}

Mat3 Phases::matrix_sigma(Vec3 h) const {
  return realize_sigma(PerturbedConductivity(alpha1, beta1, h));
}

Mat3 Phases::inclusion_sigma(Vec3 h) const {
  return realize_sigma(PerturbedConductivity(alpha2n, beta2n, h));
}

namespace {

Vec2 rotated(Vec3 h) { return Mat2::rotation() * h.transversal(); }

struct PeriodicSolve {
  std::vector<double> w;
  SolveStats stats;
};

PeriodicSolve solve_periodic(const PhaseField& field, const fem::TwoPhaseCoefficient& coef,
                             const std::vector<double>& rhs, const SolverSettings& settings) {
  const fem::PeriodicOperator op(field, coef);
  const LinearOperator a{op.size(), [&op](std::span<const double> x, std::span<double> y) {
                           op.apply(x, y);
                         }};
  KrylovOptions opt;
  opt.rtol = settings.rtol;
  opt.restart = settings.restart;
  opt.max_iterations =
      settings.max_iterations > 0 ? settings.max_iterations : 20 * field.resolution();
  opt.project = [](std::span<double> v) { remove_mean(v); };

  PeriodicSolve out;
  out.w.assign(op.size(), 0.0);
  KrylovResult res = fgmres(a, rhs, out.w, jacobi_preconditioner(op.diagonal()), opt);
  out.stats.iterations = res.iterations;
  if (!res.converged && settings.allow_fallback) {
    // The symmetric part of each phase matrix is its scalar α part; an exact
    // factorization of that operator leaves only the Hall coupling to GMRES.
    const fem::TwoPhaseCoefficient sym{coef.matrix_phase.symmetric_part(),
                                       coef.inclusion_phase.symmetric_part()};
    const fem::PeriodicOperator sym_op(field, sym);
    const SymmetricFactor factor(static_cast<int>(op.size()), sym_op.triplets(), true);
    res = fgmres(a, rhs, out.w,
                 [&factor](std::span<const double> r, std::span<double> z) { factor.solve(r, z); },
                 opt);
    out.stats.iterations += res.iterations;
    out.stats.used_fallback = true;
  }
  out.stats.residual = res.relative_residual;
  if (!res.converged) {
    std::ostringstream msg;
    msg << "cell solve did not converge: relative residual " << res.relative_residual << " after "
        << out.stats.iterations << " iterations (N=" << field.resolution() << ")";
    throw SolverError(msg.str(), res.relative_residual, out.stats.iterations);
  }
  return out;
}

// h² Σ_e A_e ∇W_e over the cell.
Vec2 coefficient_gradient_mean(const PhaseField& field, const fem::TwoPhaseCoefficient& coef,
                               const std::vector<double>& w) {
  const int n = field.resolution();
  Vec2 acc1{}, acc2{};
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 g = fem::element_gradient(w, n, i, j);
      if (field.inclusion(i, j)) acc2 = acc2 + g;
      else acc1 = acc1 + g;
    }
  }
  const double area = 1.0 / (static_cast<double>(n) * n);
  return area * (coef.matrix_phase * acc1 + coef.inclusion_phase * acc2);
}

Mat2 phase_average(const PhaseField& field, const fem::TwoPhaseCoefficient& coef) {
  const double f = field.raster_fraction();
  return (1.0 - f) * coef.matrix_phase + f * coef.inclusion_phase;
}

void check_coercive(const Mat2& sigma2d, const Phases& phases) {
  const double bound = std::min(phases.alpha1, phases.alpha2n);
  const double lowest = sigma2d.symmetric_eigenvalues()[0];
  if (lowest < bound * (1.0 - 1e-8)) {
    std::ostringstream msg;
    msg << "homogenized transversal tensor lost coercivity: smallest symmetric eigenvalue "
        << lowest << " < " << bound;
    throw SolverError(msg.str(), 0.0, 0);
  }
}

fem::TwoPhaseCoefficient transversal_coefficient(const Phases& phases, Vec3 h) {
  return {phases.matrix_block(h).matrix(), phases.inclusion_block(h).matrix()};
}

}  // namespace

double phase_average(const PhaseField& field, double v_matrix, double v_inclusion) {
  const double f = field.raster_fraction();
  return (1.0 - f) * v_matrix + f * v_inclusion;
}

CellSolution solve_cell(const PhaseField& field, const TransversalBlock& sig1,
                        const TransversalBlock& sig2n, Vec2 lambda,
                        const SolverSettings& settings) {
  if (!(sig1.alpha() > 0.0) || !(sig2n.alpha() > 0.0))
    throw ValidationError("transversal blocks must be coercive");
  return solve_cell(field, fem::TwoPhaseCoefficient{sig1.matrix(), sig2n.matrix()}, lambda,
                    settings);
}

CellSolution solve_cell(const PhaseField& field, const fem::TwoPhaseCoefficient& coef, Vec2 lambda,
                        const SolverSettings& settings) {
  PeriodicSolve s = solve_periodic(field, coef, fem::affine_load(field, coef, lambda), settings);
  CellSolution out;
  out.resolution = field.resolution();
  out.lambda = lambda;
  out.flux = coefficient_gradient_mean(field, coef, s.w) + phase_average(field, coef) * lambda;
  out.w = std::move(s.w);
  out.stats = s.stats;
  return out;
}

CellSolution solve_cell_e3(const PhaseField& field, const Phases& phases, Vec3 h,
                           const SolverSettings& settings) {
  phases.validate();
  const fem::TwoPhaseCoefficient coef = transversal_coefficient(phases, h);
  const Vec2 jh = rotated(h);
  CellSolution out;
  out.resolution = field.resolution();
  out.axial = true;
  const bool constant_hall = phases.beta1 == phases.beta2n;
  if (constant_hall || (jh.x == 0.0 && jh.y == 0.0)) {
    // Divergence-free source: the fluctuation vanishes identically.
    out.w.assign(static_cast<std::size_t>(field.resolution()) * field.resolution(), 0.0);
  } else {
    PeriodicSolve s = solve_periodic(
        field, coef, fem::flux_source_load(field, phases.beta1 * jh, phases.beta2n * jh),
        settings);
    out.w = std::move(s.w);
    out.stats = s.stats;
  }
  const double mean_b = phase_average(field, phases.beta1, phases.beta2n);
  const double mean_a = phase_average(field, phases.alpha1, phases.alpha2n);
  out.flux = coefficient_gradient_mean(field, coef, out.w) - mean_b * jh;
  out.axial_flux = mean_a + dot(weighted_gradient_mean(field, out, phases.beta1, phases.beta2n), jh);
  return out;
}

Vec2 weighted_gradient_mean(const PhaseField& field, const CellSolution& sol, double c_matrix,
                            double c_inclusion) {
  const fem::TwoPhaseCoefficient scalar{c_matrix * Mat2::identity(),
                                        c_inclusion * Mat2::identity()};
  return coefficient_gradient_mean(field, scalar, sol.w) +
         phase_average(field, c_matrix, c_inclusion) * sol.lambda;
}

Mat2 homogenize_transversal(const PhaseField& field, const fem::TwoPhaseCoefficient& coef,
                            const SolverSettings& settings, SolveStats* stats) {
  std::array<CellSolution, 2> sols;
  parallel_for(2, settings.parallelism, [&](std::size_t k) {
    sols[k] = solve_cell(field, coef, k == 0 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0}, settings);
  });
  if (stats) {
    stats->iterations = sols[0].stats.iterations + sols[1].stats.iterations;
    stats->residual = std::max(sols[0].stats.residual, sols[1].stats.residual);
    stats->used_fallback = sols[0].stats.used_fallback || sols[1].stats.used_fallback;
  }
  return Mat2{{sols[0].flux.x, sols[1].flux.x, sols[0].flux.y, sols[1].flux.y}};
}

HomogenizedPair homogenize(const PhaseField& field, const Phases& phases, Vec3 h,
                           const SolverSettings& settings) {
  phases.validate();
  const fem::TwoPhaseCoefficient coef = transversal_coefficient(phases, h);
  std::array<CellSolution, 3> sols;
  parallel_for(3, settings.parallelism, [&](std::size_t k) {
    if (k < 2) sols[k] = solve_cell(field, coef, k == 0 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0}, settings);
    else sols[k] = solve_cell_e3(field, phases, h, settings);
  });
  const Vec2 jh = rotated(h);
  const Mat2 sigma2d{{sols[0].flux.x, sols[1].flux.x, sols[0].flux.y, sols[1].flux.y}};
  const Vec2 row3{dot(weighted_gradient_mean(field, sols[0], phases.beta1, phases.beta2n), jh),
                  dot(weighted_gradient_mean(field, sols[1], phases.beta1, phases.beta2n), jh)};
  check_coercive(sigma2d, phases);

  HomogenizedPair out;
  out.sigma2d = sigma2d;
  out.sigma3d = EffectiveTensor(sigma2d, sols[2].flux, row3, *sols[2].axial_flux);
  out.route = HomogenizedPair::Route::direct;
  for (const auto& s : sols) {
    out.iterations += s.stats.iterations;
    out.max_residual = std::max(out.max_residual, s.stats.residual);
    out.used_fallback = out.used_fallback || s.stats.used_fallback;
  }
  return out;
}

HomogenizedPair homogenize_via_pi(const PhaseField& field, const Phases& phases, Vec3 h,
                                  const SolverSettings& settings) {
  phases.validate();
  const TransversalBlock sig1 = phases.matrix_block(h);
  const TransversalBlock sig2 = phases.inclusion_block(h);
  const Vec2 jh = rotated(h);

  PiPair pair{};
  const Mat2 diff = sig2.matrix() - sig1.matrix();
  const bool hall_contrast = (phases.beta2n - phases.beta1) != 0.0 && (jh.x != 0.0 || jh.y != 0.0);
  if (diff.max_abs() == 0.0 && !hall_contrast) {
    // Identical transversal blocks and no Hall contrast: the off-diagonal
    // blocks are already phase-constant, so the identity transform works.
  } else {
    pair = interface_match(sig1, sig2, phases.beta1, phases.beta2n, h);
  }

  SolveStats stats;
  const Mat2 sigma2d = homogenize_transversal(
      field, fem::TwoPhaseCoefficient{sig1.matrix(), sig2.matrix()}, settings, &stats);
  check_coercive(sigma2d, phases);

  // Phase-constant off-blocks of Π σ Π̂ (evaluated in the matrix phase).
  const Vec2 p_prime = sig1.matrix() * pair.p0 - phases.beta1 * jh;
  const Vec2 q_prime = sig1.matrix().transposed() * pair.q0 + phases.beta1 * jh;
  auto corner = [&](const TransversalBlock& s, double alpha, double beta) {
    return alpha + dot(s.matrix() * pair.p0, pair.q0) + beta * dot(pair.p0 - pair.q0, jh);
  };
  const double a_prime =
      phase_average(field, corner(sig1, phases.alpha1, phases.beta1),
                    corner(sig2, phases.alpha2n, phases.beta2n));
  const Mat3 sigma_prime = EffectiveTensor(sigma2d, p_prime, q_prime, a_prime).matrix();

  HomogenizedPair out;
  out.sigma2d = sigma2d;
  out.sigma3d = EffectiveTensor(pi_deconjugate(sigma_prime, pair));
  out.route = HomogenizedPair::Route::pi;
  out.pi_pair = pair;
  out.iterations = stats.iterations;
  out.max_residual = stats.residual;
  out.used_fallback = stats.used_fallback;
  return out;
}

PwEstimate estimate_pw_constant(const PhaseField& field, double alpha1, double alpha2n,
                                const PwSettings& settings) {
  if (!(alpha1 > 0.0) || !(alpha2n > 0.0)) throw ValidationError("PW weights must be positive");
  const fem::TwoPhaseCoefficient weight{alpha1 * Mat2::identity(), alpha2n * Mat2::identity()};
  const fem::PeriodicOperator stiff(field, weight);
  const fem::PeriodicOperator mass = fem::PeriodicOperator::mass(field, alpha1, alpha2n);
  const SymmetricFactor factor(static_cast<int>(stiff.size()), stiff.triplets(), true);
  const std::size_t n = stiff.size();

  std::vector<double> v(n), y(n), kv(n), mv(n);
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (double& x : v) x = uni(rng);
  remove_mean(v);

  PwEstimate out;
  double c_prev = 0.0;
  for (int it = 1; it <= settings.max_iterations; ++it) {
    mass.apply(v, y);
    remove_mean(y);
    factor.solve(y, v);
    stiff.apply(v, kv);
    mass.apply(v, mv);
    const double energy = kernels::dot(v, kv);
    const double c = kernels::dot(v, mv) / energy;
    const double scale = 1.0 / std::sqrt(energy);
    for (double& x : v) x *= scale;
    out.iterations = it;
    out.c_value = c;
    if (it > 1 && std::abs(c - c_prev) <= settings.tolerance * c) {
      out.converged = true;
      break;
    }
    c_prev = c;
  }
  // Residual of the generalized eigenpair on the mean-zero subspace.
  stiff.apply(v, kv);
  mass.apply(v, mv);
  remove_mean(mv);
  const double mnorm = norm2(mv);
  kernels::axpy(-out.c_value, kv, mv);
  out.eigen_residual = norm2(mv) / mnorm;
  if (!out.converged || !(out.c_value > 0.0)) {
    std::ostringstream msg;
    msg << "PW power iteration did not converge in " << out.iterations << " iterations";
    throw SolverError(msg.str(), out.eigen_residual, out.iterations);
  }
  return out;
}

}  // namespace hallhom
