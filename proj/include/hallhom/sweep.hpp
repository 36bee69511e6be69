#pragma once

// Schedule-driven convergence runs: homogenize every stage by both routes and
// compare with the closed-form limit.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hallhom/cell_solver.hpp"
#include "hallhom/formulas.hpp"
#include "hallhom/geometry.hpp"

namespace hallhom {

struct ResolutionPolicy {
  int min_n = 64;
  int max_n = 512;
  /// Cells required across the thin feature: rₙN ≥ disk_cells, tₙN ≥ frame_cells.
  double disk_cells = 4.0;
  double frame_cells = 2.0;

  /// max(min_n, ⌈4/r⌉ or ⌈4/t⌉) capped at max_n.
  int resolution_for(CellGeometry::Kind kind, double shape_param) const;
  bool resolves(CellGeometry::Kind kind, double shape_param, int n) const;
};

struct SweepOptions {
  double alpha1 = 1.0;
  double beta1 = 0.0;
  Vec3 h;
  /// Local density ρ(x′) at the sampled macroscopic point.
  double rho = 1.0;
  ResolutionPolicy policy;
  /// Fixed grid for every stage instead of the policy (0 = use policy).
  int fixed_resolution = 0;
  SolverSettings solver;
  bool compute_pw = true;
  PwSettings pw;
  /// Stage-level parallelism (<= 0: hardware concurrency).
  int parallelism = 1;
  /// σ*⁰ for custom geometries; without it custom stages have no oracle.
  std::optional<Sigma0Fn> sigma0;
  /// Record wall time per stage (makes reports nondeterministic).
  bool record_timing = false;
};

struct StageRow {
  ScheduleStage stage;
  int resolution = 0;
  bool under_resolved = false;
  double raster_fraction = 0.0;
  EffectiveTensor direct;
  EffectiveTensor pi;
  std::optional<EffectiveTensor> oracle;
  /// max|A − O| / max|O| over all nine entries (direct route).
  double error = 0.0;
  /// Same norm restricted to the transversal block.
  double transversal_error = 0.0;
  /// max|direct − pi| / max(1, max|direct|).
  double route_discrepancy = 0.0;
  std::optional<double> pw_constant;
  /// εₙ²·c for the circular schedule.
  std::optional<double> pw_rescaled;
  int iterations_direct = 0;
  int iterations_pi = 0;
  bool used_fallback = false;
  double wall_seconds = 0.0;
};

struct SweepReport {
  CellGeometry::Kind kind = CellGeometry::Kind::disk;
  LimitParams limit;
  double rho = 1.0;
  std::vector<StageRow> rows;
};

struct ConvergenceVerdict {
  std::string metric;
  std::vector<double> values;
  bool monotone_decreasing = false;
  double final_value = 0.0;
  /// d log(value) / d log(shape parameter); only with at least three stages.
  std::optional<double> log_slope;
  bool passed = false;
};

/// Homogenize each stage (stages in parallel, rows in stage order). Stages
/// the resolution policy cannot resolve are flagged and skipped.
SweepReport run_sweep(const ContrastSchedule& schedule, const SweepOptions& options);

/// Max-entry relative error max|a − b| / max|b|.
double max_entry_relative_error(const Mat3& a, const Mat3& b);
double max_entry_relative_error(const Mat2& a, const Mat2& b);

/// Scaling-law checks on a schedule: the thin-feature diagnostic (circular),
/// exact constancy of w·α₂,ₙ and w·β₂,ₙ, and boundedness of ⨍αₙ.
std::vector<ConvergenceVerdict> check_conditions(const ContrastSchedule& schedule,
                                                 double alpha1);

/// Verdict for a sequence of per-stage values (e.g. sweep errors).
ConvergenceVerdict trend_verdict(std::string metric, std::vector<double> values,
                                 const std::vector<double>& shape_params);

struct MonotonicityResult {
  Mat2 small_frame;
  Mat2 large_frame;
  /// Smallest eigenvalue of sym(A_large − A_small) (reversed when contrast < 1).
  double min_eigenvalue = 0.0;
  bool passed = false;
};

/// Ordering of homogenized tensors for nested frames t_small ⊂ t_large with
/// the inclusion conductivity `contrast` (matrix 1, h = 0).
MonotonicityResult monotonicity_test(double t_small, double t_large, double contrast, int n,
                                     const SolverSettings& settings = {});

/// Documented CSV header plus one line per stage, 17 significant digits.
void write_csv(std::ostream& out, const SweepReport& report);
/// JSON summary: parameters, per-stage rows and verdicts.
std::string to_json(const SweepReport& report, const std::vector<ConvergenceVerdict>& verdicts);

}  // namespace hallhom
