#include "hallhom/verify.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "hallhom/cell_solver.hpp"
#include "hallhom/error.hpp"
#include "hallhom/formulas.hpp"
#include "hallhom/macro.hpp"
#include "hallhom/sweep.hpp"

namespace hallhom {

namespace {

using Check = std::function<InvariantResult(std::mt19937_64&, const VerifyOptions&)>;

InvariantResult bounded(std::string name, double measured, double tol, std::string detail = {}) {
  return {std::move(name), measured <= tol, measured, tol, std::move(detail)};
}

Vec3 random_h(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

SolverSettings serial(const VerifyOptions& o) {
  SolverSettings s;
  s.parallelism = o.parallelism;
  return s;
}

const std::vector<std::pair<std::string, Check>>& checks() {
  static const std::vector<std::pair<std::string, Check>> list = {
      {"tensor.hall_matrix_cross_product",
       [](std::mt19937_64& rng, const VerifyOptions&) {
         double worst = 0.0;
         for (int k = 0; k < 50; ++k) {
           const Vec3 h = random_h(rng, 3.0), x = random_h(rng, 3.0);
           const Mat3 e = hall_matrix(h);
           const Vec3 d = e * x - cross(h, x);
           worst = std::max({worst, norm(d), max_abs_diff(e, -1.0 * e.transposed())});
         }
         return bounded("tensor.hall_matrix_cross_product", worst, 1e-14);
       }},
      {"tensor.symmetric_part_is_alpha",
       [](std::mt19937_64& rng, const VerifyOptions&) {
         std::uniform_real_distribution<double> a(0.1, 10.0), b(-5.0, 5.0);
         double worst = 0.0;
         for (int k = 0; k < 50; ++k) {
           const double alpha = a(rng);
           const Mat3 s = realize_sigma(PerturbedConductivity(alpha, b(rng), random_h(rng, 2.0)));
           worst = std::max(worst, max_abs_diff(s.symmetric_part(), alpha * Mat3::identity()));
         }
         return bounded("tensor.symmetric_part_is_alpha", worst, 1e-14);
       }},
      {"tensor.pi_round_trip",
       [](std::mt19937_64& rng, const VerifyOptions&) {
         std::uniform_real_distribution<double> u(-2.0, 2.0);
         double worst = 0.0;
         for (int k = 0; k < 50; ++k) {
           Mat3 s;
           for (double& v : s.a) v = u(rng);
           const PiPair pair{{u(rng), u(rng)}, {u(rng), u(rng)}};
           worst = std::max(worst, max_abs_diff(pi_deconjugate(pi_conjugate(s, pair), pair), s));
         }
         return bounded("tensor.pi_round_trip", worst, 1e-12);
       }},
      {"tensor.interface_match_constant_offblocks",
       [](std::mt19937_64& rng, const VerifyOptions&) {
         std::uniform_real_distribution<double> a(1.5, 100.0), b(-3.0, 3.0);
         double worst = 0.0;
         for (int k = 0; k < 50; ++k) {
           const Vec3 h = random_h(rng, 2.0);
           const double a2 = a(rng), b1 = b(rng), b2 = b(rng) * a2;
           const PerturbedConductivity p1(1.0, b1, h), p2(a2, b2, h);
           const PiPair pair = interface_match(TransversalBlock::of(1.0, b1, h),
                                               TransversalBlock::of(a2, b2, h), b1, b2, h);
           const Mat3 c1 = pi_conjugate(realize_sigma(p1), pair);
           const Mat3 c2 = pi_conjugate(realize_sigma(p2), pair);
           const double scale = std::max(1.0, c2.max_abs());
           for (int idx : {2, 5, 6, 7}) worst = std::max(worst, std::abs(c1.a[idx] - c2.a[idx]) / scale);
         }
         return bounded("tensor.interface_match_constant_offblocks", worst, 1e-12);
       }},
      {"geometry.schedule_scaling",
       [](std::mt19937_64&, const VerifyOptions&) {
         double worst = 0.0;
         for (const ContrastSchedule& s : {circular_schedule({0.2, 0.1, 0.05}, 2.0, 1.0),
                                           grid_schedule({0.125, 0.0625, 0.03125}, 2.0, 1.0)}) {
           for (const ConvergenceVerdict& v : check_conditions(s, 1.0))
             if (!v.passed) worst = std::max(worst, 1.0);
         }
         return bounded("geometry.schedule_scaling", worst, 0.0);
       }},
      {"geometry.frame_raster_exact",
       [](std::mt19937_64&, const VerifyOptions&) {
         const PhaseField f = rasterize(CellGeometry::frame(0.125), 64);
         return bounded("geometry.frame_raster_exact", std::abs(f.raster_fraction() - 0.4375), 0.0);
       }},
      {"cell.homogeneous_identity",
       [](std::mt19937_64& rng, const VerifyOptions& o) {
         const Vec3 h = random_h(rng, 1.1);
         const Phases p{1.3, 0.4, 1.3, 0.4};
         const PhaseField f = rasterize(CellGeometry::disk(0.3), o.resolution);
         const HomogenizedPair r = homogenize(f, p, h, serial(o));
         return bounded("cell.homogeneous_identity",
                        max_abs_diff(r.sigma3d.matrix(), p.matrix_sigma(h)), 1e-8);
       }},
      {"cell.laminate_means",
       [](std::mt19937_64&, const VerifyOptions& o) {
         const PhaseField f = rasterize(
             CellGeometry::custom([](double y1, double) { return y1 >= 0.0; }, 0.5, "laminate"),
             o.resolution);
         const Mat2 s = homogenize_transversal(
             f, {Mat2::identity(), 10.0 * Mat2::identity()}, serial(o));
         const double err = std::max(std::abs(s(0, 0) - 20.0 / 11.0), std::abs(s(1, 1) - 5.5));
         return bounded("cell.laminate_means", err, 1e-6);
       }},
      {"cell.route_equivalence",
       [](std::mt19937_64& rng, const VerifyOptions& o) {
         std::uniform_real_distribution<double> r(0.1, 0.35), lc(0.0, 4.0), b(-1.0, 1.0);
         double worst = 0.0;
         for (int k = 0; k < 3; ++k) {
           const double a2 = std::pow(10.0, lc(rng));
           const Phases p{1.0, b(rng), a2, b(rng) * a2};
           const PhaseField f = rasterize(CellGeometry::disk(r(rng)), o.resolution);
           const Vec3 h = random_h(rng, 1.5);
           const Mat3 d = homogenize(f, p, h, serial(o)).sigma3d.matrix();
           const Mat3 q = homogenize_via_pi(f, p, h, serial(o)).sigma3d.matrix();
           worst = std::max(worst, max_abs_diff(d, q) / std::max(1.0, d.max_abs()));
         }
         return bounded("cell.route_equivalence", worst, 1e-7);
       }},
      {"cell.antisymmetric_shift",
       [](std::mt19937_64&, const VerifyOptions& o) {
         const PhaseField f = rasterize(CellGeometry::disk(0.25), o.resolution);
         const fem::TwoPhaseCoefficient base{TransversalBlock(1.0, 0.2).matrix(),
                                             TransversalBlock(20.0, -3.0).matrix()};
         const double c = 0.7;
         const fem::TwoPhaseCoefficient shifted{base.matrix_phase + c * Mat2::rotation(),
                                                base.inclusion_phase + c * Mat2::rotation()};
         const Mat2 s0 = homogenize_transversal(f, base, serial(o));
         const Mat2 s1 = homogenize_transversal(f, shifted, serial(o));
         return bounded("cell.antisymmetric_shift", max_abs_diff(s1 - s0, c * Mat2::rotation()), 1e-8);
       }},
      {"cell.adjoint",
       [](std::mt19937_64&, const VerifyOptions& o) {
         const PhaseField f = rasterize(CellGeometry::disk(0.3), o.resolution);
         const fem::TwoPhaseCoefficient c{TransversalBlock(1.0, 0.5).matrix(),
                                          TransversalBlock(15.0, 4.0).matrix()};
         const fem::TwoPhaseCoefficient ct{c.matrix_phase.transposed(), c.inclusion_phase.transposed()};
         const Mat2 s = homogenize_transversal(f, c, serial(o));
         const Mat2 st = homogenize_transversal(f, ct, serial(o));
         return bounded("cell.adjoint", max_abs_diff(st, s.transposed()), 1e-8);
       }},
      {"cell.voigt_reuss",
       [](std::mt19937_64&, const VerifyOptions& o) {
         const PhaseField f = rasterize(CellGeometry::disk(0.3), o.resolution);
         const double a1 = 1.0, a2 = 25.0, th = f.raster_fraction();
         const Mat2 s = homogenize_transversal(f, {a1 * Mat2::identity(), a2 * Mat2::identity()},
                                               serial(o));
         const double harmonic = 1.0 / ((1.0 - th) / a1 + th / a2);
         const double arithmetic = (1.0 - th) * a1 + th * a2;
         const auto ev = s.symmetric_eigenvalues();
         const double violation = std::max({0.0, harmonic - ev[0], ev[1] - arithmetic});
         return bounded("cell.voigt_reuss", violation, 1e-10);
       }},
      {"cell.corrector_mean_zero",
       [](std::mt19937_64&, const VerifyOptions& o) {
         const PhaseField f = rasterize(CellGeometry::disk(0.2), o.resolution);
         const CellSolution s = solve_cell(f, TransversalBlock(1.0, 0.3), TransversalBlock(50.0, 10.0),
                                           Vec2{1.0, 0.0}, serial(o));
         double mean = 0.0;
         for (double v : s.w) mean += v;
         return bounded("cell.corrector_mean_zero", std::abs(mean) / s.w.size(), 1e-12);
       }},
      {"formulas.oracle_consistency",
       [](std::mt19937_64& rng, const VerifyOptions&) {
         std::uniform_real_distribution<double> a(0.1, 10.0), b(-3.0, 3.0), r(0.2, 3.0);
         double worst = 0.0;
         for (int k = 0; k < 100; ++k) {
           const LimitParams p{a(rng), b(rng), a(rng), b(rng), random_h(rng, 2.0)};
           const double rho = r(rng);
           LimitParams local = p;
           local.alpha2 *= rho;
           local.beta2 *= rho;
           const Mat3 c = assemble_effective(transversal_limit(sigma0_circular, local), rho, p).matrix();
           const Mat3 g = assemble_effective(transversal_limit(sigma0_grid, local), rho, p).matrix();
           worst = std::max(worst, max_entry_relative_error(c, oracle_circular(p, rho).matrix()));
           worst = std::max(worst, max_entry_relative_error(g, oracle_grid(p, rho).matrix()));
         }
         return bounded("formulas.oracle_consistency", worst, 1e-12);
       }},
      {"sweep.frame_monotonicity",
       [](std::mt19937_64&, const VerifyOptions& o) {
         const MonotonicityResult m = monotonicity_test(0.0625, 0.125, 50.0, 64, serial(o));
         return bounded("sweep.frame_monotonicity", -m.min_eigenvalue, 1e-8);
       }},
      {"cell.pw_homogeneous",
       [](std::mt19937_64&, const VerifyOptions& o) {
         const PhaseField f = rasterize(CellGeometry::disk(0.25), o.resolution);
         const PwEstimate e = estimate_pw_constant(f, 2.0, 2.0);
         // First periodic Q1 mode: h²(2 + cos θ) / (6(1 − cos θ)), θ = 2π/N.
         const double th = 2.0 * std::numbers::pi / o.resolution;
         const double hh = 1.0 / o.resolution;
         const double exact = hh * hh * (2.0 + std::cos(th)) / (6.0 * (1.0 - std::cos(th)));
         return bounded("cell.pw_homogeneous", std::abs(e.c_value - exact) / exact, 1e-6);
       }},
      {"macro.energy_identity",
       [](std::mt19937_64&, const VerifyOptions&) {
         MacroProblem p;
         p.cell = CellGeometry::frame(0.25);
         p.phases = {1.0, 0.5, 20.0, 5.0};
         p.epsilon = 0.5;
         p.h = {0.0, 0.0, 1.0};
         const MacroSolution s = solve_fine(p, {12, 12, 12});
         return bounded("macro.energy_identity", s.energy_defect(), 1e-8);
       }},
  };
  return list;
}

}  // namespace

std::vector<InvariantResult> run_invariant_suite(const VerifyOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::vector<InvariantResult> out;
  for (const auto& [name, check] : checks()) {
    InvariantResult r;
    try {
      r = check(rng, options);
    } catch (const Error& e) {
      r = {name, false, std::nan(""), 0.0, e.what()};
    }
    out.push_back(r);
    if (!r.passed && options.fail_fast) break;
  }
  return out;
}

}  // namespace hallhom
