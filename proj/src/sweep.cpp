#include "hallhom/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "hallhom/error.hpp"
#include "hallhom/parallel.hpp"

namespace hallhom {

int ResolutionPolicy::resolution_for(CellGeometry::Kind kind, double shape_param) const {
  int n = min_n;
  if (kind != CellGeometry::Kind::custom && shape_param > 0.0)
    n = std::max(n, static_cast<int>(std::ceil(4.0 / shape_param - 1e-9)));
  return std::min(n, max_n);
}

bool ResolutionPolicy::resolves(CellGeometry::Kind kind, double shape_param, int n) const {
  switch (kind) {
    case CellGeometry::Kind::disk: return shape_param * n >= disk_cells - 1e-9;
    case CellGeometry::Kind::frame: return shape_param * n >= frame_cells - 1e-9;
    case CellGeometry::Kind::custom: return n >= kMinResolution;
  }
  return false;
}

double max_entry_relative_error(const Mat3& a, const Mat3& b) {
  const double scale = b.max_abs();
  return max_abs_diff(a, b) / (scale > 0.0 ? scale : 1.0);
}

double max_entry_relative_error(const Mat2& a, const Mat2& b) {
  const double scale = b.max_abs();
  return max_abs_diff(a, b) / (scale > 0.0 ? scale : 1.0);
}

namespace {

// Local shape parameter and geometry at density ρ.
struct LocalCell {
  double param;
  CellGeometry geom;
};

LocalCell local_cell(CellGeometry::Kind kind, const ContrastSchedule& schedule, std::size_t i,
                     double rho) {
  const double base = schedule.stages[i].shape_param;
  switch (kind) {
    case CellGeometry::Kind::disk: {
      const double r = modulated_radius(RhoField::constant(rho), base, Vec2{0.5, 0.5});
      return {r, CellGeometry::disk(r)};
    }
    case CellGeometry::Kind::frame: {
      const double t = base * rho;
      if (!(t < 0.5)) throw ValidationError("frame thickness t*rho must stay below 1/2");
      return {t, CellGeometry::frame(t)};
    }
    case CellGeometry::Kind::custom:
      break;
  }
  return {base, schedule.geometry(i)};
}

StageRow run_stage(const ContrastSchedule& schedule, std::size_t i, const SweepOptions& opt,
                   const SolverSettings& solver) {
  const auto start = std::chrono::steady_clock::now();
  StageRow row;
  row.stage = schedule.stages[i];
  const LocalCell cell = local_cell(schedule.kind, schedule, i, opt.rho);
  row.resolution = opt.fixed_resolution > 0
                       ? opt.fixed_resolution
                       : opt.policy.resolution_for(schedule.kind, cell.param);
  if (!opt.policy.resolves(schedule.kind, cell.param, row.resolution)) {
    row.under_resolved = true;
    return row;
  }

  const PhaseField field = rasterize(cell.geom, row.resolution);
  row.raster_fraction = field.raster_fraction();
  const Phases phases{opt.alpha1, opt.beta1, row.stage.alpha2n, row.stage.beta2n};
  const HomogenizedPair direct = homogenize(field, phases, opt.h, solver);
  const HomogenizedPair pi = homogenize_via_pi(field, phases, opt.h, solver);
  row.direct = direct.sigma3d;
  row.pi = pi.sigma3d;
  row.iterations_direct = direct.iterations;
  row.iterations_pi = pi.iterations;
  row.used_fallback = direct.used_fallback || pi.used_fallback;
  row.route_discrepancy = max_abs_diff(direct.sigma3d.matrix(), pi.sigma3d.matrix()) /
                          std::max(1.0, direct.sigma3d.matrix().max_abs());

  const LimitParams limit{opt.alpha1, opt.beta1, schedule.alpha2, schedule.beta2, opt.h};
  switch (schedule.kind) {
    case CellGeometry::Kind::disk: row.oracle = oracle_circular(limit, opt.rho); break;
    case CellGeometry::Kind::frame: row.oracle = oracle_grid(limit, opt.rho); break;
    case CellGeometry::Kind::custom:
      if (opt.sigma0) {
        LimitParams local = limit;
        local.alpha2 *= opt.rho;
        local.beta2 *= opt.rho;
        row.oracle = assemble_effective(transversal_limit(*opt.sigma0, local), opt.rho, limit);
      }
      break;
  }
  if (row.oracle) {
    row.error = max_entry_relative_error(row.direct.matrix(), row.oracle->matrix());
    row.transversal_error =
        max_entry_relative_error(row.direct.transversal(), row.oracle->transversal());
  }

  if (opt.compute_pw) {
    const PwEstimate pw = estimate_pw_constant(field, opt.alpha1, row.stage.alpha2n, opt.pw);
    row.pw_constant = pw.c_value;
    if (row.stage.epsilon > 0.0) row.pw_rescaled = row.stage.epsilon * row.stage.epsilon * pw.c_value;
  }
  if (opt.record_timing)
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::string kind_name(CellGeometry::Kind k) {
  switch (k) {
    case CellGeometry::Kind::disk: return "disk";
    case CellGeometry::Kind::frame: return "frame";
    case CellGeometry::Kind::custom: return "custom";
  }
  return "unknown";
}

std::string g17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json mat_json(const Mat3& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return rows;
}

}  // namespace

SweepReport run_sweep(const ContrastSchedule& schedule, const SweepOptions& options) {
  if (schedule.stages.empty()) throw ValidationError("schedule has no stages");
  if (!(options.rho > 0.0) || !std::isfinite(options.rho))
    throw ValidationError("rho must be positive");
  Phases{options.alpha1, options.beta1, 1.0, 0.0}.validate();

  SweepReport report;
  report.kind = schedule.kind;
  report.limit = {options.alpha1, options.beta1, schedule.alpha2, schedule.beta2, options.h};
  report.rho = options.rho;
  report.rows.resize(schedule.stages.size());

  const int outer = options.parallelism > 0 ? options.parallelism : default_parallelism();
  SolverSettings inner = options.solver;
  if (outer > 1) inner.parallelism = 1;
  parallel_for(schedule.stages.size(), outer, [&](std::size_t i) {
    report.rows[i] = run_stage(schedule, i, options, inner);
  });
  return report;
}

ConvergenceVerdict trend_verdict(std::string metric, std::vector<double> values,
                                 const std::vector<double>& shape_params) {
  ConvergenceVerdict v;
  v.metric = std::move(metric);
  v.values = std::move(values);
  if (v.values.empty()) return v;
  v.final_value = v.values.back();
  v.monotone_decreasing = true;
  for (std::size_t i = 1; i < v.values.size(); ++i)
    if (!(v.values[i] < v.values[i - 1])) v.monotone_decreasing = false;
  const bool positive = std::all_of(v.values.begin(), v.values.end(), [](double x) { return x > 0.0; }) &&
                        std::all_of(shape_params.begin(), shape_params.end(), [](double x) { return x > 0.0; });
  if (v.values.size() >= 3 && shape_params.size() == v.values.size() && positive) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(v.values.size());
    for (std::size_t i = 0; i < v.values.size(); ++i) {
      const double x = std::log(shape_params[i]);
      const double y = std::log(v.values[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double den = m * sxx - sx * sx;
    if (den != 0.0) v.log_slope = (m * sxy - sx * sy) / den;
  }
  v.passed = v.monotone_decreasing;
  return v;
}

std::vector<ConvergenceVerdict> check_conditions(const ContrastSchedule& schedule, double alpha1) {
  std::vector<double> params, diag, wa, wb, theta, mean_alpha;
  for (const ScheduleStage& s : schedule.stages) {
    params.push_back(s.shape_param);
    diag.push_back(s.diagnostic);
    wa.push_back(s.scaling_weight * s.alpha2n);
    wb.push_back(s.scaling_weight * s.beta2n);
    theta.push_back(s.theta_n);
    mean_alpha.push_back(alpha1 * (1.0 - s.theta_n) + s.alpha2n * s.theta_n);
  }
  std::vector<ConvergenceVerdict> out;

  auto constancy = [&](std::string name, const std::vector<double>& values, double target) {
    ConvergenceVerdict v = trend_verdict(std::move(name), values, params);
    double worst = 0.0;
    for (double x : values) worst = std::max(worst, std::abs(x - target));
    v.passed = worst <= 1e-12 * std::max(1.0, std::abs(target));
    return v;
  };

  if (schedule.kind == CellGeometry::Kind::disk) {
    out.push_back(trend_verdict("eps2_abs_log_r", diag, params));
  } else {
    out.push_back(constancy("four_t_alpha2n", diag, schedule.alpha2));
  }
  out.push_back(constancy("scaled_alpha2n", wa, schedule.alpha2));
  out.push_back(constancy("scaled_beta2n", wb, schedule.beta2));
  out.push_back(trend_verdict("theta_n", theta, params));

  ConvergenceVerdict bound = trend_verdict("mean_alpha_n", mean_alpha, params);
  const double cap = alpha1 + schedule.alpha2;
  bound.passed = std::all_of(mean_alpha.begin(), mean_alpha.end(),
                             [&](double x) { return x <= cap * (1.0 + 1e-12); });
  out.push_back(bound);
  return out;
}

MonotonicityResult monotonicity_test(double t_small, double t_large, double contrast, int n,
                                     const SolverSettings& settings) {
  if (!(t_small > 0.0) || !(t_small <= t_large) || !(t_large < 0.5))
    throw ValidationError("monotonicity test needs 0 < t_small <= t_large < 1/2");
  if (!(contrast > 0.0)) throw ValidationError("contrast must be positive");
  if (t_small * n < 2.0 - 1e-9)
    throw ValidationError("frame t_small is under-resolved on the requested grid");
  const fem::TwoPhaseCoefficient coef{Mat2::identity(), contrast * Mat2::identity()};
  MonotonicityResult out;
  out.small_frame = homogenize_transversal(rasterize(CellGeometry::frame(t_small), n), coef, settings);
  out.large_frame = homogenize_transversal(rasterize(CellGeometry::frame(t_large), n), coef, settings);
  const Mat2 diff = contrast >= 1.0 ? out.large_frame - out.small_frame
                                    : out.small_frame - out.large_frame;
  out.min_eigenvalue = diff.symmetric_eigenvalues()[0];
  out.passed = out.min_eigenvalue >= -1e-8;
  return out;
}

void write_csv(std::ostream& out, const SweepReport& report) {
  static const char* const kEntries[] = {"11", "12", "13", "21", "22", "23", "31", "32", "33"};
  out << "stage,epsilon,shape_param,theta_n,alpha2n,beta2n,diagnostic,N,raster_fraction,under_resolved";
  for (const char* prefix : {"direct_", "pi_", "oracle_"})
    for (const char* e : kEntries) out << ',' << prefix << e;
  out << ",error,transversal_error,route_discrepancy,pw_c,pw_rescaled,iterations_direct,"
         "iterations_pi,used_fallback,wall_seconds\n";

  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const StageRow& r = report.rows[i];
    const ScheduleStage& s = r.stage;
    out << i << ',' << g17(s.epsilon) << ',' << g17(s.shape_param) << ',' << g17(s.theta_n) << ','
        << g17(s.alpha2n) << ',' << g17(s.beta2n) << ',' << g17(s.diagnostic) << ','
        << r.resolution << ',';
    if (r.under_resolved) {
      out << ",1";
      for (int k = 0; k < 27 + 9; ++k) out << ',';
      out << '\n';
      continue;
    }
    out << g17(r.raster_fraction) << ",0";
    for (const EffectiveTensor* t : {&r.direct, &r.pi}) {
      for (double v : t->matrix().a) out << ',' << g17(v);
    }
    for (int k = 0; k < 9; ++k) out << ',' << (r.oracle ? g17(r.oracle->matrix().a[k]) : "");
    out << ',' << (r.oracle ? g17(r.error) : "") << ',' << (r.oracle ? g17(r.transversal_error) : "")
        << ',' << g17(r.route_discrepancy) << ',' << (r.pw_constant ? g17(*r.pw_constant) : "")
        << ',' << (r.pw_rescaled ? g17(*r.pw_rescaled) : "") << ',' << r.iterations_direct << ','
        << r.iterations_pi << ',' << (r.used_fallback ? 1 : 0) << ',' << g17(r.wall_seconds)
        << '\n';
  }
}

std::string to_json(const SweepReport& report, const std::vector<ConvergenceVerdict>& verdicts) {
  using nlohmann::json;
  json j;
  j["geometry"] = kind_name(report.kind);
  j["params"] = {{"alpha1", report.limit.alpha1},
                 {"beta1", report.limit.beta1},
                 {"alpha2", report.limit.alpha2},
                 {"beta2", report.limit.beta2},
                 {"h", {report.limit.h.x, report.limit.h.y, report.limit.h.z}},
                 {"rho", report.rho}};
  json rows = json::array();
  for (const StageRow& r : report.rows) {
    json row = {{"epsilon", r.stage.epsilon},
                {"shape_param", r.stage.shape_param},
                {"theta_n", r.stage.theta_n},
                {"alpha2n", r.stage.alpha2n},
                {"beta2n", r.stage.beta2n},
                {"diagnostic", r.stage.diagnostic},
                {"N", r.resolution},
                {"under_resolved", r.under_resolved}};
    if (!r.under_resolved) {
      row["raster_fraction"] = r.raster_fraction;
      row["direct"] = mat_json(r.direct.matrix());
      row["pi"] = mat_json(r.pi.matrix());
      row["route_discrepancy"] = r.route_discrepancy;
      row["iterations_direct"] = r.iterations_direct;
      row["iterations_pi"] = r.iterations_pi;
      row["used_fallback"] = r.used_fallback;
      if (r.oracle) {
        row["oracle"] = mat_json(r.oracle->matrix());
        row["error"] = r.error;
        row["transversal_error"] = r.transversal_error;
      }
      if (r.pw_constant) row["pw_c"] = *r.pw_constant;
      if (r.pw_rescaled) row["pw_rescaled"] = *r.pw_rescaled;
      if (r.wall_seconds > 0.0) row["wall_seconds"] = r.wall_seconds;
    }
    rows.push_back(std::move(row));
  }
  j["stages"] = std::move(rows);
  json vs = json::array();
  for (const ConvergenceVerdict& v : verdicts) {
    json e = {{"metric", v.metric},
              {"values", v.values},
              {"monotone_decreasing", v.monotone_decreasing},
              {"final_value", v.final_value},
              {"passed", v.passed}};
    if (v.log_slope) e["log_slope"] = *v.log_slope;
    vs.push_back(std::move(e));
  }
  j["verdicts"] = std::move(vs);
  return j.dump(2);
}

}  // namespace hallhom
