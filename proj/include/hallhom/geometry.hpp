#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hallhom/tensor.hpp"

namespace hallhom {

/// Cross-section of one period cell Y₂ = (−½, ½)², inclusion = phase 2.
class CellGeometry {
 public:
  enum class Kind { disk, frame, custom };
  using Indicator = std::function<bool(double y1, double y2)>;

  /// Centered disk of radius r, 0 < r < ½.
  static CellGeometry disk(double r);
  /// Band max(|y₁|, |y₂|) ≥ ½ − t along the cell boundary, 0 < t < ½.
  static CellGeometry frame(double t);
  /// Arbitrary indicator. exact_area is whatever the caller knows; pass a
  /// negative value when unknown and the raster fraction will be used instead.
  static CellGeometry custom(Indicator inside, double exact_area, std::string label = "custom");

  Kind kind() const noexcept { return kind_; }
  /// r for a disk, t for a frame, 0 otherwise.
  double parameter() const noexcept { return param_; }
  double exact_area() const noexcept { return exact_area_; }
  const std::string& label() const noexcept { return label_; }

  /// Point membership; the argument is reduced to Y₂ first so the indicator is periodic.
  bool contains(double y1, double y2) const;

 private:
  CellGeometry(Kind kind, double param, double area, Indicator inside, std::string label);

  Kind kind_;
  double param_;
  double exact_area_;
  Indicator inside_;
  std::string label_;
};

/// Rasterized two-phase indicator on an N×N periodic grid. Cell (i, j) has
/// center (−½ + (i+½)/N, −½ + (j+½)/N); storage is row-major with i (y₁) fastest.
class PhaseField {
 public:
  PhaseField(int n, std::vector<std::uint8_t> inclusion, double exact_fraction);

  int resolution() const noexcept { return n_; }
  bool inclusion(int i, int j) const { return mask_[static_cast<std::size_t>(j) * n_ + i] != 0; }
  const std::vector<std::uint8_t>& mask() const noexcept { return mask_; }
  double raster_fraction() const noexcept { return raster_fraction_; }
  double exact_fraction() const noexcept { return exact_fraction_; }
  std::size_t inclusion_count() const noexcept { return count_; }

 private:
  int n_;
  std::vector<std::uint8_t> mask_;
  std::size_t count_;
  double raster_fraction_;
  double exact_fraction_;
};

inline constexpr int kMinResolution = 4;

/// Cell is inclusion iff its center is (boundary counts as inside). Throws
/// ValidationError for N < 4.
PhaseField rasterize(const CellGeometry& geom, int n);

/// Text grid format: N, then N² whitespace-separated 0/1 values, y₁ fastest.
PhaseField read_phase_field(std::istream& in);
PhaseField read_phase_field_file(const std::string& path);
void write_phase_field(std::ostream& out, const PhaseField& field);

/// Slowly varying density ρ(x′) on the macroscopic cross-section (0,1)²,
/// clamped pointwise to [c₁, c₂].
class RhoField {
 public:
  using Evaluator = std::function<double(Vec2)>;

  RhoField(Evaluator rho, double c1, double c2);
  static RhoField constant(double value = 1.0);

  double operator()(Vec2 x) const;
  double lower() const noexcept { return c1_; }
  double upper() const noexcept { return c2_; }
  bool mean_normalized() const noexcept { return normalized_; }

  /// Midpoint-rule mean of the clamped density over (0,1)² on a q×q grid.
  double mean(int quadrature_points = 256) const;
  /// Verify the mean is 1 within tol; if rescale is set, divide by the mean
  /// instead (bounds are rescaled too). Throws ValidationError otherwise.
  RhoField normalized(bool rescale, double tol = 1e-6) const;

 private:
  Evaluator rho_;
  double c1_;
  double c2_;
  double scale_ = 1.0;
  bool normalized_ = false;
};

/// rₙ√ρ(x′), clamped so the fibre stays strictly inside the cell.
double modulated_radius(const RhoField& rho, double r_base, Vec2 cell_center);

/// One stage of a high-contrast sequence.
struct ScheduleStage {
  int n = 0;
  double epsilon = 0.0;      // period; 0 when not meaningful
  double shape_param = 0.0;  // rₙ (disk) or tₙ (frame)
  double alpha2n = 0.0;
  double beta2n = 0.0;
  double theta_n = 0.0;      // inclusion volume fraction
  double scaling_weight = 0.0;  // w with w·α₂,ₙ = α₂ exactly: πr² (disk), 4t (frame)
  double diagnostic = 0.0;   // ε²|ln r| (disk) or 4tα₂,ₙ (frame)
};

struct ContrastSchedule {
  CellGeometry::Kind kind = CellGeometry::Kind::disk;
  double alpha2 = 0.0;
  double beta2 = 0.0;
  std::vector<ScheduleStage> stages;

  CellGeometry geometry(std::size_t stage) const;
};

/// rₙ = εₙ, θₙ = πrₙ², α₂,ₙ = α₂/θₙ, β₂,ₙ = β₂/θₙ.
ContrastSchedule circular_schedule(const std::vector<double>& eps, double alpha2, double beta2);
/// α₂,ₙ = α₂/(4tₙ), β₂,ₙ = β₂/(4tₙ), θₙ = 4tₙ(1 − tₙ).
ContrastSchedule grid_schedule(const std::vector<double>& t, double alpha2, double beta2);

}  // namespace hallhom
