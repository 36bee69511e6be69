#include "hallhom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "hallhom/error.hpp"

namespace hallhom {

namespace {

double wrap_to_cell(double y) { return y - std::floor(y + 0.5); }

}  // namespace

CellGeometry::CellGeometry(Kind kind, double param, double area, Indicator inside,
                           std::string label)
    : kind_(kind), param_(param), exact_area_(area), inside_(std::move(inside)),
      label_(std::move(label)) {}

CellGeometry CellGeometry::disk(double r) {
  if (!(r > 0.0 && r < 0.5)) throw ValidationError("disk radius must lie in (0, 1/2)");
  const double r2 = r * r;
  return CellGeometry(Kind::disk, r, std::numbers::pi * r2,
                      [r2](double y1, double y2) { return y1 * y1 + y2 * y2 <= r2; }, "disk");
}

CellGeometry CellGeometry::frame(double t) {
  if (!(t > 0.0 && t < 0.5)) throw ValidationError("frame thickness must lie in (0, 1/2)");
  const double inner = 0.5 - t;
  return CellGeometry(
      Kind::frame, t, 4.0 * t * (1.0 - t),
      [inner](double y1, double y2) { return std::max(std::abs(y1), std::abs(y2)) >= inner; },
      "frame");
}

CellGeometry CellGeometry::custom(Indicator inside, double exact_area, std::string label) {
  if (!inside) throw ValidationError("custom geometry needs an indicator");
  return CellGeometry(Kind::custom, 0.0, exact_area, std::move(inside), std::move(label));
}

bool CellGeometry::contains(double y1, double y2) const {
  return inside_(wrap_to_cell(y1), wrap_to_cell(y2));
}

PhaseField::PhaseField(int n, std::vector<std::uint8_t> inclusion, double exact_fraction)
    : n_(n), mask_(std::move(inclusion)) {
  if (n < kMinResolution) throw ValidationError("phase field resolution below minimum");
  if (mask_.size() != static_cast<std::size_t>(n) * n)
    throw ValidationError("phase field mask has wrong size");
  count_ = static_cast<std::size_t>(std::count_if(mask_.begin(), mask_.end(),
                                                  [](std::uint8_t v) { return v != 0; }));
  raster_fraction_ = static_cast<double>(count_) / (static_cast<double>(n) * n);
  exact_fraction_ = exact_fraction >= 0.0 ? exact_fraction : raster_fraction_;
}

PhaseField rasterize(const CellGeometry& geom, int n) {
  if (n < kMinResolution) {
    std::ostringstream msg;
    msg << "resolution N=" << n << " below minimum " << kMinResolution;
    throw ValidationError(msg.str());
  }
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * n, 0);
  const double h = 1.0 / n;
  for (int j = 0; j < n; ++j) {
    const double y2 = -0.5 + (j + 0.5) * h;
    for (int i = 0; i < n; ++i) {
      const double y1 = -0.5 + (i + 0.5) * h;
      mask[static_cast<std::size_t>(j) * n + i] = geom.contains(y1, y2) ? 1 : 0;
    }
  }
  return PhaseField(n, std::move(mask), geom.exact_area());
}

PhaseField read_phase_field(std::istream& in) {
  long long n = 0;
  if (!(in >> n)) throw ValidationError("grid file: missing resolution header");
  if (n < kMinResolution || n > 1 << 14) throw ValidationError("grid file: bad resolution");
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n * n));
  for (auto& v : mask) {
    int bit = -1;
    if (!(in >> bit) || (bit != 0 && bit != 1))
      throw ValidationError("grid file: expected N*N values in {0,1}");
    v = static_cast<std::uint8_t>(bit);
  }
  std::string trailing;
  if (in >> trailing) throw ValidationError("grid file: trailing data after N*N values");
  return PhaseField(static_cast<int>(n), std::move(mask), -1.0);
}

PhaseField read_phase_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open grid file: " + path);
  return read_phase_field(in);
}

void write_phase_field(std::ostream& out, const PhaseField& field) {
  const int n = field.resolution();
  out << n << '\n';
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) out << (i ? " " : "") << (field.inclusion(i, j) ? 1 : 0);
    out << '\n';
  }
}

RhoField::RhoField(Evaluator rho, double c1, double c2) : rho_(std::move(rho)), c1_(c1), c2_(c2) {
  if (!rho_) throw ValidationError("rho field needs an evaluator");
  if (!(c1 > 0.0 && c1 <= c2) || !std::isfinite(c2))
    throw ValidationError("rho bounds must satisfy 0 < c1 <= c2");
}

RhoField RhoField::constant(double value) {
  RhoField f([value](Vec2) { return value; }, value, value);
  f.normalized_ = value == 1.0;
  return f;
}

double RhoField::operator()(Vec2 x) const {
  return scale_ * std::clamp(rho_(x), c1_, c2_);
}

double RhoField::mean(int q) const {
  double sum = 0.0;
  for (int j = 0; j < q; ++j)
    for (int i = 0; i < q; ++i) sum += (*this)(Vec2{(i + 0.5) / q, (j + 0.5) / q});
  return sum / (static_cast<double>(q) * q);
}

RhoField RhoField::normalized(bool rescale, double tol) const {
  const double m = mean();
  RhoField out = *this;
  if (std::abs(m - 1.0) <= tol) {
    out.normalized_ = true;
    return out;
  }
  if (!rescale) {
    std::ostringstream msg;
    msg << "rho field mean is " << m << ", expected 1";
    throw ValidationError(msg.str());
  }
  out.scale_ = scale_ / m;
  out.normalized_ = true;
  return out;
}

double modulated_radius(const RhoField& rho, double r_base, Vec2 cell_center) {
  // Keep a one-ulp-ish margin below ½ so the fibre never touches its neighbours.
  constexpr double kMaxRadius = 0.5 - 1e-9;
  const double r = r_base * std::sqrt(rho(cell_center));
  return std::clamp(r, 0.0, kMaxRadius);
}

CellGeometry ContrastSchedule::geometry(std::size_t stage) const {
  const double p = stages.at(stage).shape_param;
  return kind == CellGeometry::Kind::disk ? CellGeometry::disk(p) : CellGeometry::frame(p);
}

namespace {

void require_strictly_decreasing(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw ValidationError(std::string(what) + " list is empty");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1]))
      throw ValidationError(std::string(what) + " list must be strictly decreasing");
}

}  // namespace

ContrastSchedule circular_schedule(const std::vector<double>& eps, double alpha2, double beta2) {
  require_strictly_decreasing(eps, "epsilon");
  if (!(alpha2 > 0.0)) throw ValidationError("alpha2 must be positive");
  ContrastSchedule s{CellGeometry::Kind::disk, alpha2, beta2, {}};
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const double e = eps[k];
    if (!(e > 0.0 && e < 0.5)) throw ValidationError("epsilon must lie in (0, 1/2)");
    const double r = e;
    const double theta = std::numbers::pi * r * r;
    s.stages.push_back(ScheduleStage{static_cast<int>(k + 1), e, r, alpha2 / theta,
                                     beta2 / theta, theta, theta, e * e * std::abs(std::log(r))});
  }
  return s;
}

ContrastSchedule grid_schedule(const std::vector<double>& t, double alpha2, double beta2) {
  require_strictly_decreasing(t, "thickness");
  if (!(alpha2 > 0.0)) throw ValidationError("alpha2 must be positive");
  ContrastSchedule s{CellGeometry::Kind::frame, alpha2, beta2, {}};
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double tk = t[k];
    if (!(tk > 0.0 && tk < 0.5)) throw ValidationError("thickness must lie in (0, 1/2)");
    const double w = 4.0 * tk;
    const double a2n = alpha2 / w;
    s.stages.push_back(ScheduleStage{static_cast<int>(k + 1), 0.0, tk, a2n, beta2 / w,
                                     4.0 * tk * (1.0 - tk), w, w * a2n});
  }
  return s;
}

}  // namespace hallhom
