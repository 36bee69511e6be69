#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hallhom/cell_solver.hpp"
#include "hallhom/error.hpp"
#include "hallhom/formulas.hpp"
#include "hallhom/macro.hpp"
#include "hallhom/parallel.hpp"
#include "hallhom/sweep.hpp"
#include "hallhom/verify.hpp"

namespace hallhom::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct AcceptanceFailure : Error {
  using Error::Error;
};

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

void print_matrix(std::ostream& out, const std::string& label, const Mat3& m) {
  out << label << '\n';
  for (int i = 0; i < 3; ++i)
    out << "  " << g17(m(i, 0)) << ' ' << g17(m(i, 1)) << ' ' << g17(m(i, 2)) << '\n';
}

json matrix_json(const Mat3& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return rows;
}

std::vector<double> parse_list(const std::string& text, const std::string& what,
                               char sep = ',') {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("cannot parse " + what + " value '" + item + "'");
    }
  }
  if (out.empty()) throw ValidationError(what + " is empty");
  return out;
}

Vec3 parse_vec3(const std::string& text) {
  const std::vector<double> v = parse_list(text, "--h");
  if (v.size() != 3) throw ValidationError("--h needs three comma-separated components");
  for (double x : v)
    if (!std::isfinite(x)) throw ValidationError("--h must be finite");
  return {v[0], v[1], v[2]};
}

struct GeometrySpec {
  std::optional<CellGeometry> geom;
  std::optional<PhaseField> field;  // file geometries are already rasterized
};

GeometrySpec parse_geometry(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  GeometrySpec g;
  if (kind == "disk") {
    g.geom = CellGeometry::disk(parse_list(arg, "disk radius").at(0));
  } else if (kind == "frame") {
    g.geom = CellGeometry::frame(parse_list(arg, "frame thickness").at(0));
  } else if (kind == "laminate") {
    g.geom = CellGeometry::custom([](double y1, double) { return y1 >= 0.0; }, 0.5, "laminate");
  } else if (kind == "file") {
    g.field = read_phase_field_file(arg);
  } else {
    throw ValidationError("unknown geometry '" + spec + "' (disk:R, frame:T, laminate, file:PATH)");
  }
  return g;
}

PhaseField field_for(const GeometrySpec& g, int n) {
  if (g.field) return *g.field;
  return rasterize(*g.geom, n);
}

struct Globals {
  std::string config;
  int threads = 0;
  std::string output_dir;

  int parallelism() const { return threads > 0 ? threads : default_parallelism(); }

  fs::path resolve(const std::string& file) const {
    fs::path p(file);
    if (p.is_absolute()) return p;
    std::string dir = output_dir;
    if (dir.empty()) {
      const char* env = std::getenv(kOutputDirEnv);
      dir = env ? env : ".";
    }
    return fs::path(dir) / p;
  }

  void write(const std::string& file, const std::string& content, std::ostream& out) const {
    const fs::path p = resolve(file);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ValidationError("cannot open output file " + p.string());
    f << content;
    if (!f) throw ValidationError("cannot write output file " + p.string());
    out << "wrote " << p.string() << '\n';
  }
};

struct PhaseOptions {
  double alpha1 = 1.0;
  double beta1 = 0.0;
  double alpha2 = 1.0;
  double beta2 = 0.0;
  std::string h = "0,0,0";
};

void add_phase_options(CLI::App* sub, PhaseOptions& p, bool stage) {
  sub->add_option("--alpha1", p.alpha1, "matrix conductivity");
  sub->add_option("--beta1", p.beta1, "matrix Hall coefficient");
  if (stage) {
    sub->add_option("--alpha2n", p.alpha2, "inclusion conductivity at this stage");
    sub->add_option("--beta2n", p.beta2, "inclusion Hall coefficient at this stage");
  } else {
    sub->add_option("--alpha2", p.alpha2, "rescaled inclusion conductivity limit");
    sub->add_option("--beta2", p.beta2, "rescaled inclusion Hall limit");
  }
  sub->add_option("--h", p.h, "magnetic field x,y,z");
}

// ---------------------------------------------------------------- commands

struct CellArgs {
  std::string geometry;
  int n = 64;
  PhaseOptions phases;
  double rtol = 1e-10;
  std::string json_out;
};

int cmd_cell(const CellArgs& a, const Globals& g, std::ostream& out) {
  const Phases phases{a.phases.alpha1, a.phases.beta1, a.phases.alpha2, a.phases.beta2};
  phases.validate();
  const Vec3 h = parse_vec3(a.phases.h);
  const PhaseField field = field_for(parse_geometry(a.geometry), a.n);
  SolverSettings s;
  s.rtol = a.rtol;
  s.parallelism = g.parallelism();
  const HomogenizedPair direct = homogenize(field, phases, h, s);
  const HomogenizedPair pi = homogenize_via_pi(field, phases, h, s);
  const double gap = max_abs_diff(direct.sigma3d.matrix(), pi.sigma3d.matrix());

  out << "N " << field.resolution() << " raster_fraction " << g17(field.raster_fraction()) << '\n';
  print_matrix(out, "direct", direct.sigma3d.matrix());
  print_matrix(out, "pi", pi.sigma3d.matrix());
  out << "route_discrepancy " << g17(gap) << '\n';
  out << "iterations " << direct.iterations << ' ' << pi.iterations << '\n';
  if (!a.json_out.empty()) {
    json j = {{"N", field.resolution()},
              {"raster_fraction", field.raster_fraction()},
              {"direct", matrix_json(direct.sigma3d.matrix())},
              {"pi", matrix_json(pi.sigma3d.matrix())},
              {"route_discrepancy", gap},
              {"iterations_direct", direct.iterations},
              {"iterations_pi", pi.iterations}};
    g.write(a.json_out, j.dump(2) + "\n", out);
  }
  return kOk;
}

struct SweepArgs {
  std::string schedule;
  std::string values;
  PhaseOptions phases;
  double rho = 1.0;
  bool no_pw = false;
  bool timing = false;
  int fixed_n = 0;
  std::string csv;
  std::string json_out;
};

int cmd_sweep(const SweepArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  const std::vector<double> values = parse_list(a.values, "--values");
  ContrastSchedule schedule;
  if (a.schedule == "circular") schedule = circular_schedule(values, a.phases.alpha2, a.phases.beta2);
  else if (a.schedule == "grid") schedule = grid_schedule(values, a.phases.alpha2, a.phases.beta2);
  else throw ValidationError("--schedule must be circular or grid");

  SweepOptions o;
  o.alpha1 = a.phases.alpha1;
  o.beta1 = a.phases.beta1;
  o.h = parse_vec3(a.phases.h);
  o.rho = a.rho;
  o.compute_pw = !a.no_pw;
  o.record_timing = a.timing;
  o.fixed_resolution = a.fixed_n;
  o.parallelism = g.parallelism();
  const SweepReport report = run_sweep(schedule, o);

  std::vector<ConvergenceVerdict> verdicts = check_conditions(schedule, o.alpha1);
  std::vector<double> errors, params;
  for (const StageRow& r : report.rows) {
    if (r.under_resolved || !r.oracle) continue;
    errors.push_back(r.error);
    params.push_back(r.stage.shape_param);
  }
  ConvergenceVerdict trend = trend_verdict("oracle_error", errors, params);
  verdicts.push_back(trend);

  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const StageRow& r = report.rows[i];
    out << "stage " << i << " param " << g17(r.stage.shape_param) << " N " << r.resolution;
    if (r.under_resolved) {
      out << " under-resolved\n";
      err << "hallhom:warning:validation: stage " << i << " is under-resolved and was skipped\n";
      continue;
    }
    out << " error " << g17(r.error) << " route " << g17(r.route_discrepancy);
    if (r.pw_constant) out << " pw " << g17(*r.pw_constant);
    out << '\n';
  }
  for (const ConvergenceVerdict& v : verdicts)
    out << "verdict " << v.metric << ' ' << (v.passed ? "pass" : "fail") << '\n';

  if (!a.csv.empty()) {
    std::ostringstream csv;
    write_csv(csv, report);
    g.write(a.csv, csv.str(), out);
  }
  if (!a.json_out.empty()) g.write(a.json_out, to_json(report, verdicts) + "\n", out);

  // Hard invariants: scaling laws and route agreement. The error trend is
  // reported but not enforced here.
  for (std::size_t i = 0; i + 1 < verdicts.size(); ++i)
    if (!verdicts[i].passed) throw AcceptanceFailure("schedule condition failed: " + verdicts[i].metric);
  for (const StageRow& r : report.rows)
    if (!r.under_resolved && r.route_discrepancy > 1e-7)
      throw AcceptanceFailure("route discrepancy above 1e-7");
  return kOk;
}

struct OracleArgs {
  std::string example;
  PhaseOptions phases;
  double rho = 1.0;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out) {
  const LimitParams p{a.phases.alpha1, a.phases.beta1, a.phases.alpha2, a.phases.beta2,
                      parse_vec3(a.phases.h)};
  EffectiveTensor t;
  if (a.example == "circular") t = oracle_circular(p, a.rho);
  else if (a.example == "grid") t = oracle_grid(p, a.rho);
  else throw ValidationError("--example must be circular or grid");
  print_matrix(out, a.example, t.matrix());
  return kOk;
}

struct PwArgs {
  std::string geometry;
  int n = 64;
  double alpha1 = 1.0;
  double alpha2n = 1.0;
  double epsilon = 0.0;
};

int cmd_pw(const PwArgs& a, std::ostream& out) {
  const PhaseField field = field_for(parse_geometry(a.geometry), a.n);
  const PwEstimate e = estimate_pw_constant(field, a.alpha1, a.alpha2n);
  out << "c " << g17(e.c_value) << '\n';
  out << "eigen_residual " << g17(e.eigen_residual) << '\n';
  out << "iterations " << e.iterations << '\n';
  if (a.epsilon > 0.0) out << "c_rescaled " << g17(a.epsilon * a.epsilon * e.c_value) << '\n';
  return kOk;
}

struct MacroArgs {
  std::string geometry = "frame:0.16666666666666667";
  std::string epsilons = "0.25,0.125";
  PhaseOptions phases;
  int cells = 48;
  int cell_n = 96;
  std::string f = "1;1;1";
  std::string export_prefix;
};

int cmd_macro(const MacroArgs& a, const Globals& g, std::ostream& out) {
  const Phases phases{a.phases.alpha1, a.phases.beta1, a.phases.alpha2, a.phases.beta2};
  phases.validate();
  const Vec3 h = parse_vec3(a.phases.h);
  const GeometrySpec geo = parse_geometry(a.geometry);
  if (!geo.geom) throw ValidationError("macro needs a disk or frame geometry");

  SeparablePolynomial f;
  {
    std::vector<std::vector<double>> factors;
    std::stringstream ss(a.f);
    std::string part;
    while (std::getline(ss, part, ';')) factors.push_back(parse_list(part, "--f"));
    if (factors.size() != 3) throw ValidationError("--f needs three ';'-separated factors");
    f = {factors[0], factors[1], factors[2]};
  }
  std::vector<double> eps = parse_list(a.epsilons, "--epsilons");
  std::sort(eps.begin(), eps.end(), std::greater<>());
  const GridDims dims{a.cells, a.cells, a.cells};

  SolverSettings s;
  s.parallelism = g.parallelism();
  const HomogenizedPair hom = homogenize(rasterize(*geo.geom, a.cell_n), phases, h, s);
  print_matrix(out, "homogenized", hom.sigma3d.matrix());

  // Validate every problem before the first solve.
  std::vector<MacroProblem> problems;
  for (double e : eps) {
    MacroProblem p{*geo.geom, phases, e, h, f};
    p.validate();
    problems.push_back(p);
  }

  const MacroSolution uh = solve_homogenized(hom.sigma3d, f, dims);
  out << "homogenized energy_defect " << g17(uh.energy_defect()) << " iterations " << uh.iterations
      << '\n';
  bool ok = uh.energy_defect() <= 1e-8;
  std::optional<double> last_l2;
  bool decreasing = true;
  if (!a.export_prefix.empty()) {
    std::ostringstream bin;
    write_binary(bin, uh);
    g.write(a.export_prefix + "_homogenized.bin", bin.str(), out);
    g.write(a.export_prefix + "_homogenized.json", metadata_json(uh, "homogenized") + "\n", out);
  }
  for (std::size_t i = 0; i < problems.size(); ++i) {
    const MacroSolution uf = solve_fine(problems[i], dims);
    const ErrorMetrics m = compare(uf, uh);
    out << "epsilon " << g17(eps[i]) << " l2_relative " << g17(m.l2_relative) << " h1_relative "
        << g17(m.h1_relative) << " energy_defect " << g17(uf.energy_defect()) << " iterations "
        << uf.iterations << '\n';
    ok = ok && uf.energy_defect() <= 1e-8;
    if (last_l2 && !(m.l2_relative < *last_l2)) decreasing = false;
    last_l2 = m.l2_relative;
    if (!a.export_prefix.empty()) {
      const std::string stem = a.export_prefix + "_fine_" + std::to_string(i);
      std::ostringstream bin;
      write_binary(bin, uf);
      g.write(stem + ".bin", bin.str(), out);
      g.write(stem + ".json", metadata_json(uf, "fine epsilon=" + g17(eps[i])) + "\n", out);
    }
  }
  if (!ok) throw AcceptanceFailure("energy identity violated beyond 1e-8");
  if (!decreasing) throw AcceptanceFailure("L2 error does not decrease as epsilon shrinks");
  return kOk;
}

struct VerifyArgs {
  int n = 32;
  std::uint64_t seed = 20240611;
  bool all = false;
};

int cmd_verify(const VerifyArgs& a, const Globals& g, std::ostream& out) {
  VerifyOptions o;
  o.resolution = a.n;
  o.seed = a.seed;
  o.fail_fast = !a.all;
  o.parallelism = g.parallelism();
  if (o.resolution < kMinResolution) throw ValidationError("--N below minimum resolution");
  std::string first_failure;
  for (const InvariantResult& r : run_invariant_suite(o)) {
    out << (r.passed ? "pass " : "FAIL ") << r.name << " measured " << g17(r.measured) << " tol "
        << g17(r.tolerance);
    if (!r.detail.empty()) out << " (" << r.detail << ')';
    out << '\n';
    if (!r.passed && first_failure.empty()) first_failure = r.name;
  }
  if (!first_failure.empty()) throw AcceptanceFailure("invariant violated: " + first_failure);
  return kOk;
}

// ------------------------------------------------------------ config files

std::string json_scalar(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return g17(v.get<double>());
  throw ValidationError("config key '" + key + "' has an unsupported value type");
}

// Flags from the config file for keys not given on the command line.
std::vector<std::string> config_args(const json& cfg, CLI::App* sub,
                                     const std::vector<std::string>& given) {
  std::vector<std::string> out;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") continue;
    const std::string flag = "--" + key;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (!opt || flag == "--help")
      throw ValidationError("unknown config key '" + key + "' for subcommand " + sub->get_name());
    const bool present = std::any_of(given.begin(), given.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (present) continue;
    if (value.is_boolean()) {
      if (opt->get_type_size() != 0) throw ValidationError("config key '" + key + "' is not a flag");
      if (value.get<bool>()) out.push_back(flag);
      continue;
    }
    std::string text;
    if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i)
        text += (i ? "," : "") + json_scalar(value[i], key);
    } else {
      text = json_scalar(value, key);
    }
    out.push_back(flag);
    out.push_back(text);
  }
  return out;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw ValidationError("config file must hold a JSON object");
  return cfg;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Homogenized conductivity of high-contrast Hall composites", "hallhom"};
  // -h stays free: --h is the magnetic field.
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "JSON file with option values (flags override it)");
  app.add_option("--threads", g.threads, "worker threads (default: all cores)");
  app.add_option("--output-dir", g.output_dir,
                 std::string("directory for relative output paths (default: $") + kOutputDirEnv +
                     " or .)");

  CellArgs cell;
  CLI::App* c = app.add_subcommand("cell", "homogenize one cell by both routes");
  c->add_option("--geometry", cell.geometry, "disk:R | frame:T | laminate | file:PATH")->required();
  c->add_option("--N", cell.n, "cells per side");
  add_phase_options(c, cell.phases, true);
  c->add_option("--rtol", cell.rtol, "Krylov relative tolerance");
  c->add_option("--json", cell.json_out, "write result as JSON");

  SweepArgs sweep;
  CLI::App* s = app.add_subcommand("sweep", "run a high-contrast schedule against the limit");
  s->add_option("--schedule", sweep.schedule, "circular | grid")->required();
  s->add_option("--values", sweep.values, "decreasing eps (circular) or t (grid) list")->required();
  add_phase_options(s, sweep.phases, false);
  s->add_option("--rho", sweep.rho, "local density at the sampled point");
  s->add_flag("--no-pw", sweep.no_pw, "skip Poincare-Wirtinger estimates");
  s->add_flag("--timing", sweep.timing, "record wall time (breaks byte-identical reports)");
  s->add_option("--fixed-N", sweep.fixed_n, "grid for every stage instead of the policy");
  s->add_option("--csv", sweep.csv, "CSV report file");
  s->add_option("--json", sweep.json_out, "JSON summary file");

  OracleArgs oracle;
  CLI::App* o = app.add_subcommand("oracle", "evaluate a closed-form limit tensor");
  o->add_option("--example", oracle.example, "circular | grid")->required();
  add_phase_options(o, oracle.phases, false);
  o->add_option("--rho", oracle.rho, "local density");

  PwArgs pw;
  CLI::App* p = app.add_subcommand("pw", "weighted Poincare-Wirtinger constant of a cell");
  p->add_option("--geometry", pw.geometry, "disk:R | frame:T | laminate | file:PATH")->required();
  p->add_option("--N", pw.n, "cells per side");
  p->add_option("--alpha1", pw.alpha1, "matrix weight");
  p->add_option("--alpha2n", pw.alpha2n, "inclusion weight");
  p->add_option("--epsilon", pw.epsilon, "period for the rescaled constant");

  MacroArgs macro;
  CLI::App* m = app.add_subcommand("macro", "fine-scale vs homogenized Dirichlet solves");
  m->add_option("--geometry", macro.geometry, "disk:R | frame:T");
  m->add_option("--epsilons", macro.epsilons, "periods, e.g. 0.25,0.125");
  add_phase_options(m, macro.phases, true);
  m->add_option("--cells", macro.cells, "3D grid cells per side (<= 48)");
  m->add_option("--cell-N", macro.cell_n, "cell-problem grid for the homogenized tensor");
  m->add_option("--f", macro.f, "source factors px;py;pz, ascending coefficients");
  m->add_option("--export", macro.export_prefix, "write binary grids with this prefix");

  VerifyArgs verify;
  CLI::App* v = app.add_subcommand("verify", "run the invariant suite");
  v->add_option("--N", verify.n, "cell grid for the solver checks");
  v->add_option("--seed", verify.seed, "random seed");
  v->add_flag("--all", verify.all, "run every check instead of stopping at the first failure");

  auto fail = [&err](const char* kind, const std::string& msg, int code) {
    err << "hallhom:error:" << kind << ": " << msg << '\n';
    return code;
  };

  try {
    std::vector<std::string> full = args;
    // A config file contributes flags for keys the command line leaves unset.
    std::optional<std::string> config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
      else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path) {
      const json cfg = load_config(*config_path);
      auto pos = std::find_if(full.begin(), full.end(), [&](const std::string& a) {
        return app.get_subcommand_no_throw(a) != nullptr;
      });
      if (pos == full.end()) {
        if (!cfg.contains("command") || !cfg["command"].is_string())
          throw ValidationError("no subcommand given on the command line or in the config file");
        full.insert(full.begin(), cfg["command"].get<std::string>());
        pos = full.begin();
      }
      CLI::App* sub = app.get_subcommand_no_throw(*pos);
      if (!sub) throw ValidationError("unknown subcommand in config file");
      const std::vector<std::string> extra = config_args(cfg, sub, args);
      full.insert(pos + 1, extra.begin(), extra.end());
    }
    std::vector<std::string> reversed(full.rbegin(), full.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return fail("validation", e.what(), kValidation);
  } catch (const ValidationError& e) {
    return fail("validation", e.what(), kValidation);
  }

  try {
    if (g.threads < 0) throw ValidationError("--threads must be >= 0");
    if (c->parsed()) return cmd_cell(cell, g, out);
    if (s->parsed()) return cmd_sweep(sweep, g, out, err);
    if (o->parsed()) return cmd_oracle(oracle, out);
    if (p->parsed()) return cmd_pw(pw, out);
    if (m->parsed()) return cmd_macro(macro, g, out);
    if (v->parsed()) return cmd_verify(verify, g, out);
    return fail("validation", "no subcommand", kValidation);
  } catch (const AcceptanceFailure& e) {
    return fail("acceptance", e.what(), kAcceptance);
  } catch (const ValidationError& e) {
    return fail("validation", e.what(), kValidation);
  } catch (const SolverError& e) {
    return fail("solver", e.what(), kSolver);
  } catch (const fs::filesystem_error& e) {
    return fail("io", e.what(), kValidation);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kSolver);
  }
}

}  // namespace hallhom::cli
