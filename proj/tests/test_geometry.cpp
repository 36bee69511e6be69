#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "hallhom/error.hpp"
#include "hallhom/geometry.hpp"

using namespace hallhom;
using std::numbers::pi;

TEST_CASE("disk rasterization") {
  const PhaseField f = rasterize(CellGeometry::disk(0.25), 64);
  CHECK(f.resolution() == 64);
  CHECK(f.exact_fraction() == doctest::Approx(pi / 16));
  CHECK(std::abs(f.raster_fraction() - pi / 16) < 0.01);
  CHECK(f.raster_fraction() ==
        doctest::Approx(static_cast<double>(f.inclusion_count()) / (64.0 * 64.0)));
  CHECK(f.inclusion(32, 32));
  CHECK_FALSE(f.inclusion(0, 0));
}

TEST_CASE("frame rasterization is exact on aligned grids") {
  const PhaseField f = rasterize(CellGeometry::frame(0.125), 64);
  CHECK(f.exact_fraction() == doctest::Approx(0.4375));
  CHECK(f.raster_fraction() == 0.4375);
  for (int n : {16, 32, 48, 96}) {
    const PhaseField g = rasterize(CellGeometry::frame(0.25), n);
    CHECK(g.raster_fraction() == 0.75);
  }
}

TEST_CASE("invalid geometries and resolutions") {
  CHECK_THROWS_AS(CellGeometry::disk(0.0), ValidationError);
  CHECK_THROWS_AS(CellGeometry::disk(0.5), ValidationError);
  CHECK_THROWS_AS(CellGeometry::frame(0.0), ValidationError);
  CHECK_THROWS_AS(CellGeometry::frame(0.6), ValidationError);
  CHECK_THROWS_AS(rasterize(CellGeometry::disk(0.2), 3), ValidationError);
}

TEST_CASE("custom indicators are periodic") {
  const CellGeometry g = CellGeometry::custom([](double y1, double) { return y1 >= 0.0; }, 0.5);
  CHECK(g.contains(0.25, 0.0));
  CHECK(g.contains(1.25, -3.0));
  CHECK_FALSE(g.contains(-0.25, 0.1));
  CHECK_FALSE(g.contains(0.75, 0.1));
  const PhaseField f = rasterize(g, 32);
  CHECK(f.raster_fraction() == 0.5);
}

TEST_CASE("disk raster fraction converges with refinement") {
  const double exact = pi * 0.3 * 0.3;
  double first = 0.0, last = 0.0;
  for (int n : {32, 64, 128, 256}) {
    const double err = std::abs(rasterize(CellGeometry::disk(0.3), n).raster_fraction() - exact);
    CHECK(err * n < 1.0);  // O(1/N)
    if (n == 32) first = err;
    last = err;
  }
  CHECK(last < first);
}

TEST_CASE("phase field text round trip") {
  const PhaseField f = rasterize(CellGeometry::disk(0.3), 8);
  std::stringstream ss;
  write_phase_field(ss, f);
  const PhaseField g = read_phase_field(ss);
  CHECK(g.resolution() == 8);
  CHECK(g.mask() == f.mask());
  CHECK(g.raster_fraction() == f.raster_fraction());
}

TEST_CASE("malformed phase field files are rejected") {
  std::stringstream bad_value("4\n0 1 0 2 0 0 0 0 0 0 0 0 0 0 0 0\n");
  CHECK_THROWS_AS(read_phase_field(bad_value), ValidationError);
  std::stringstream short_file("4\n0 1 0\n");
  CHECK_THROWS_AS(read_phase_field(short_file), ValidationError);
  std::stringstream trailing("4\n0 0 0 0 0 1 1 0 0 1 1 0 0 0 0 0 7\n");
  CHECK_THROWS_AS(read_phase_field(trailing), ValidationError);
  std::stringstream tiny("2\n0 0 0 0\n");
  CHECK_THROWS_AS(read_phase_field(tiny), ValidationError);
  CHECK_THROWS_AS(read_phase_field_file("/nonexistent/grid.txt"), ValidationError);
}

TEST_CASE("circular schedule") {
  const ContrastSchedule s = circular_schedule({0.2, 0.1}, 2.0, 1.0);
  REQUIRE(s.stages.size() == 2);
  CHECK(s.stages[0].theta_n == doctest::Approx(pi * 0.04));
  CHECK(s.stages[1].theta_n == doctest::Approx(pi * 0.01));
  CHECK(s.stages[0].alpha2n == doctest::Approx(2 / (0.04 * pi)));
  CHECK(s.stages[1].alpha2n == doctest::Approx(2 / (0.01 * pi)));
  CHECK(s.stages[1].diagnostic == doctest::Approx(0.02303).epsilon(1e-3));
  for (const ScheduleStage& st : s.stages) {
    CHECK(st.shape_param == st.epsilon);
    CHECK(std::abs(st.theta_n * st.alpha2n - 2.0) <= 1e-12);
    CHECK(std::abs(st.theta_n * st.beta2n - 1.0) <= 1e-12);
  }
  CHECK(s.geometry(1).kind() == CellGeometry::Kind::disk);
  CHECK(s.geometry(1).parameter() == 0.1);
}

TEST_CASE("grid schedule") {
  const ContrastSchedule s = grid_schedule({0.125, 0.05}, 2.0, 1.0);
  CHECK(s.stages[1].alpha2n == doctest::Approx(10.0));
  CHECK(s.stages[0].beta2n == doctest::Approx(2.0));
  CHECK(s.stages[0].theta_n == doctest::Approx(0.4375));
  for (const ScheduleStage& st : s.stages) {
    CHECK(std::abs(4 * st.shape_param * st.alpha2n - 2.0) <= 1e-12);
    CHECK(st.diagnostic == doctest::Approx(2.0));
  }
}

TEST_CASE("schedules reject bad lists") {
  CHECK_THROWS_AS(circular_schedule({0.1, 0.2}, 2, 1), ValidationError);
  CHECK_THROWS_AS(circular_schedule({0.1, 0.1}, 2, 1), ValidationError);
  CHECK_THROWS_AS(circular_schedule({}, 2, 1), ValidationError);
  CHECK_THROWS_AS(circular_schedule({0.2, 0.1}, 0, 1), ValidationError);
  CHECK_THROWS_AS(grid_schedule({0.6, 0.1}, 2, 1), ValidationError);
  CHECK_THROWS_AS(grid_schedule({0.1, 0.0}, 2, 1), ValidationError);
}

TEST_CASE("modulated radius") {
  CHECK(modulated_radius(RhoField::constant(), 0.1, {0.3, 0.3}) == doctest::Approx(0.1));
  const RhoField four([](Vec2) { return 4.0; }, 0.5, 5.0);
  CHECK(modulated_radius(four, 0.1, {0.5, 0.5}) == doctest::Approx(0.2));
  for (double rho : {0.5, 1.0, 2.0, 3.5}) {
    const RhoField f([rho](Vec2) { return rho; }, 0.1, 10.0);
    const double r = modulated_radius(f, 0.05, {0.1, 0.9});
    CHECK(pi * r * r == doctest::Approx(rho * pi * 0.05 * 0.05));
  }
  // Clamping keeps the fibre inside the cell.
  const RhoField huge([](Vec2) { return 100.0; }, 1.0, 100.0);
  CHECK(modulated_radius(huge, 0.2, {0.5, 0.5}) < 0.5);
}

TEST_CASE("rho bounds and normalization") {
  const RhoField clamp([](Vec2 x) { return 10.0 * x.x; }, 0.5, 2.0);
  CHECK(clamp({0.0, 0.0}) == 0.5);
  CHECK(clamp({1.0, 0.0}) == 2.0);
  CHECK(clamp({0.1, 0.0}) == doctest::Approx(1.0));

  const RhoField wave([](Vec2 x) { return 1.0 + 0.5 * std::sin(2 * pi * x.x); }, 0.1, 3.0);
  CHECK(wave.mean() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(wave.normalized(false).mean_normalized());

  const RhoField twice([](Vec2) { return 2.0; }, 0.5, 4.0);
  CHECK_THROWS_AS(twice.normalized(false), ValidationError);
  const RhoField fixed = twice.normalized(true);
  CHECK(fixed.mean() == doctest::Approx(1.0));
  CHECK(fixed({0.2, 0.2}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(RhoField([](Vec2) { return 1.0; }, 0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(RhoField([](Vec2) { return 1.0; }, 2.0, 1.0), ValidationError);
}
