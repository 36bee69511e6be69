#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <sstream>
#include <string>

#include "hallhom/error.hpp"
#include "hallhom/sweep.hpp"

using namespace hallhom;

namespace {

SweepOptions quick(Vec3 h) {
  SweepOptions o;
  o.alpha1 = 1.0;
  o.beta1 = 0.5;
  o.h = h;
  o.policy.min_n = 32;
  o.policy.max_n = 96;
  o.pw.max_iterations = 2000;
  return o;
}

int count(const std::string& s, char c) {
  int k = 0;
  for (char x : s) k += x == c;
  return k;
}

const ConvergenceVerdict& find(const std::vector<ConvergenceVerdict>& vs, const std::string& m) {
  for (const auto& v : vs)
    if (v.metric == m) return v;
  FAIL("missing verdict " << m);
  return vs.front();
}

}  // namespace

TEST_CASE("resolution policy") {
  ResolutionPolicy p;
  CHECK(p.resolution_for(CellGeometry::Kind::disk, 0.25) == 64);
  CHECK(p.resolution_for(CellGeometry::Kind::disk, 0.025) == 160);
  CHECK(p.resolution_for(CellGeometry::Kind::frame, 0.01) == 400);
  CHECK(p.resolution_for(CellGeometry::Kind::disk, 0.001) == 512);
  CHECK_FALSE(p.resolves(CellGeometry::Kind::disk, 0.001, 512));
  CHECK(p.resolves(CellGeometry::Kind::frame, 1.0 / 32.0, 64));
}

TEST_CASE("contrast one stage reproduces the phase tensor") {
  ContrastSchedule s;
  s.kind = CellGeometry::Kind::disk;
  s.alpha2 = 1.0;
  s.stages.push_back({1, 0.25, 0.25, 1.0, 0.5, 0.0, 0.0, 0.0});
  SweepOptions o = quick(Vec3{0.3, 0.2, 1.0});
  o.compute_pw = false;
  const SweepReport r = run_sweep(s, o);
  const Mat3 expect = Phases{1.0, 0.5, 1.0, 0.5}.matrix_sigma(o.h);
  CHECK(max_abs_diff(r.rows[0].direct.matrix(), expect) < 1e-12);
  CHECK(r.rows[0].route_discrepancy < 1e-12);
}

TEST_CASE("circular sweep approaches the limit") {
  const ContrastSchedule s = circular_schedule({0.25, 0.125}, 1.0, 0.5);
  SweepOptions o = quick(Vec3{1.0, 1.0, 1.0});
  o.parallelism = 2;
  const SweepReport r = run_sweep(s, o);
  REQUIRE(r.rows.size() == 2);
  for (const StageRow& row : r.rows) {
    CHECK_FALSE(row.under_resolved);
    CHECK(row.route_discrepancy < 1e-7);
    REQUIRE(row.oracle.has_value());
    REQUIRE(row.pw_rescaled.has_value());
    CHECK(*row.pw_rescaled == doctest::Approx(row.stage.epsilon * row.stage.epsilon * *row.pw_constant));
  }
  CHECK(r.rows[1].error < r.rows[0].error);
  CHECK(r.rows[1].error < 0.1);
}

TEST_CASE("grid sweep approaches the limit") {
  const ContrastSchedule s = grid_schedule({0.1, 0.05}, 1.0, 0.5);
  SweepOptions o = quick(Vec3{0.0, 0.0, 1.0});
  o.compute_pw = false;
  const SweepReport r = run_sweep(s, o);
  CHECK(r.rows[1].transversal_error < r.rows[0].transversal_error);
  for (const StageRow& row : r.rows) CHECK(row.route_discrepancy < 1e-7);
}

TEST_CASE("under-resolved stages are flagged and written as empty rows") {
  const ContrastSchedule s = circular_schedule({0.2, 0.001}, 1.0, 0.0);
  SweepOptions o = quick(Vec3{0.0, 0.0, 1.0});
  o.compute_pw = false;
  const SweepReport r = run_sweep(s, o);
  CHECK_FALSE(r.rows[0].under_resolved);
  CHECK(r.rows[1].under_resolved);

  std::ostringstream csv;
  write_csv(csv, r);
  std::istringstream in(csv.str());
  std::string header, a, b;
  std::getline(in, header);
  std::getline(in, a);
  std::getline(in, b);
  CHECK(count(a, ',') == count(header, ','));
  CHECK(count(b, ',') == count(header, ','));
  CHECK(header.rfind("stage,epsilon,", 0) == 0);
}

TEST_CASE("reports are deterministic and parse back") {
  const ContrastSchedule s = grid_schedule({0.125, 0.0625}, 2.0, 1.0);
  SweepOptions o = quick(Vec3{0.5, 0.0, 1.0});
  o.pw.max_iterations = 3000;
  const SweepReport a = run_sweep(s, o);
  o.parallelism = 2;
  const SweepReport b = run_sweep(s, o);
  std::ostringstream ca, cb;
  write_csv(ca, a);
  write_csv(cb, b);
  CHECK(ca.str() == cb.str());
  const auto verdicts = check_conditions(s, 1.0);
  const std::string ja = to_json(a, verdicts);
  CHECK(ja == to_json(b, verdicts));
  const auto j = nlohmann::json::parse(ja);
  CHECK(j["geometry"] == "frame");
  CHECK(j["stages"].size() == 2);
  CHECK(j["stages"][0]["direct"].size() == 3);
  CHECK(j["stages"][0]["direct"][2][2].get<double>() == a.rows[0].direct.corner());
  CHECK(j["verdicts"].size() == verdicts.size());
  CHECK_FALSE(j["stages"][0].contains("wall_seconds"));
}

TEST_CASE("scaling conditions of the built-in schedules") {
  const auto circ = check_conditions(circular_schedule({0.2, 0.1, 0.05, 0.025}, 1.0, 0.3), 1.0);
  for (const auto& v : circ) {
    CAPTURE(v.metric);
    CHECK(v.passed);
  }
  const auto& diag = find(circ, "eps2_abs_log_r");
  REQUIRE(diag.log_slope.has_value());
  CHECK(*diag.log_slope > 1.0);

  const auto grid = check_conditions(grid_schedule({0.2, 0.1, 0.05}, 3.0, -1.0), 1.0);
  for (const auto& v : grid) {
    CAPTURE(v.metric);
    CHECK(v.passed);
  }
  CHECK(find(grid, "four_t_alpha2n").final_value == doctest::Approx(3.0));
}

TEST_CASE("a drifting schedule fails the constancy checks") {
  ContrastSchedule s = grid_schedule({0.2, 0.1, 0.05}, 3.0, 1.0);
  s.stages[2].alpha2n *= 1.5;
  s.stages[2].diagnostic *= 1.5;
  const auto v = check_conditions(s, 1.0);
  CHECK_FALSE(find(v, "scaled_alpha2n").passed);
  CHECK_FALSE(find(v, "four_t_alpha2n").passed);
  CHECK(find(v, "scaled_beta2n").passed);

  ContrastSchedule c = circular_schedule({0.2, 0.1}, 1.0, 0.0);
  c.stages[1].alpha2n *= 10.0;
  CHECK_FALSE(find(check_conditions(c, 1.0), "mean_alpha_n").passed);
}

TEST_CASE("trend verdict") {
  const auto v = trend_verdict("e", {0.4, 0.2, 0.1}, {0.4, 0.2, 0.1});
  CHECK(v.passed);
  REQUIRE(v.log_slope.has_value());
  CHECK(*v.log_slope == doctest::Approx(1.0));
  CHECK_FALSE(trend_verdict("e", {0.1, 0.2}, {0.2, 0.1}).passed);
  CHECK_FALSE(trend_verdict("e", {0.2, 0.1}, {0.2, 0.1}).log_slope.has_value());
}

TEST_CASE("nested frames are ordered") {
  const auto up = monotonicity_test(0.1, 0.2, 50.0, 40);
  CHECK(up.passed);
  CHECK(up.min_eigenvalue > 0.0);
  const auto down = monotonicity_test(0.1, 0.2, 0.02, 40);
  CHECK(down.passed);
  CHECK(down.large_frame(0, 0) < down.small_frame(0, 0));
  CHECK_THROWS_AS(monotonicity_test(0.01, 0.2, 5.0, 40), ValidationError);
  CHECK_THROWS_AS(monotonicity_test(0.3, 0.2, 5.0, 40), ValidationError);
}

TEST_CASE("invalid sweep inputs") {
  ContrastSchedule empty;
  CHECK_THROWS_AS(run_sweep(empty, SweepOptions{}), ValidationError);
  SweepOptions o;
  o.rho = 0.0;
  CHECK_THROWS_AS(run_sweep(grid_schedule({0.1}, 1.0, 0.0), o), ValidationError);
  o.rho = 6.0;
  CHECK_THROWS_AS(run_sweep(grid_schedule({0.1}, 1.0, 0.0), o), ValidationError);
}
