#include "hallhom/macro.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "hallhom/error.hpp"
#include "hallhom/fem.hpp"
#include "hallhom/kernels/kernels.hpp"
#include "hallhom/krylov.hpp"
#include "hallhom/sparse_factor.hpp"

namespace hallhom {

double SeparablePolynomial::eval(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double SeparablePolynomial::operator()(Vec3 x) const {
  return eval(px, x.x) * eval(py, x.y) * eval(pz, x.z);
}

void MacroProblem::validate() const {
  phases.validate();
  if (!(epsilon > 0.0) || !(epsilon <= 1.0)) throw ValidationError("epsilon must lie in (0, 1]");
  const double cells = 1.0 / epsilon;
  if (std::abs(cells - std::round(cells)) > 1e-9)
    throw ValidationError("1/epsilon must be an integer number of periods");
  if (phases.alpha2n / phases.alpha1 > kMaxMacroContrast ||
      phases.alpha1 / phases.alpha2n > kMaxMacroContrast)
    throw ValidationError("macro contrast exceeds the supported ceiling");
  for (const auto* c : {&f.px, &f.py, &f.pz})
    if (c->empty()) throw ValidationError("source polynomial factors must be non-empty");
}

Mat3 MacroProblem::sigma_at(Vec2 x) const {
  const bool inside = cell.contains(x.x / epsilon - 0.5, x.y / epsilon - 0.5);
  const Vec3 field = h;
  return inside ? phases.inclusion_sigma(field) : phases.matrix_sigma(field);
}

double MacroSolution::energy_defect() const {
  const double scale = std::abs(load) > 0.0 ? std::abs(load) : 1.0;
  return std::abs(energy - load) / scale;
}

namespace {

// Assembled 27-point operator on interior nodes; coefficients per 2D node.
class ColumnarOperator {
 public:
  ColumnarOperator(const std::vector<Mat3>& columns, GridDims d)
      : d_(d), mx_(d.nx - 1), my_(d.ny - 1), mz_(d.nz - 1) {
    const std::size_t m2 = static_cast<std::size_t>(mx_) * my_;
    for (auto& c : coef_) c.assign(m2, 0.0);
    const double hx = 1.0 / d.nx, hy = 1.0 / d.ny, hz = 1.0 / d.nz;
    for (int ej = 0; ej < d.ny; ++ej) {
      for (int ei = 0; ei < d.nx; ++ei) {
        const fem::ElementMatrix3 ke =
            fem::stiffness_3d(columns[static_cast<std::size_t>(ej) * d.nx + ei], hx, hy, hz);
        for (int a = 0; a < 8; ++a) {
          const int ax = a & 1, ay = (a >> 1) & 1, az = (a >> 2) & 1;
          const int gi = ei + ax - 1, gj = ej + ay - 1;  // interior index of the row node
          if (gi < 0 || gi >= mx_ || gj < 0 || gj >= my_) continue;
          const std::size_t node = static_cast<std::size_t>(gj) * mx_ + gi;
          for (int b = 0; b < 8; ++b) {
            const int di = (b & 1) - ax, dj = ((b >> 1) & 1) - ay, dk = ((b >> 2) & 1) - az;
            coef_[(dk + 1) * 9 + (dj + 1) * 3 + (di + 1)][node] += ke[a * 8 + b];
          }
        }
      }
    }
    view_.mx = mx_;
    view_.my = my_;
    view_.mz = mz_;
    for (int s = 0; s < 27; ++s) view_.coef[s] = coef_[s].data();
  }

  std::size_t size() const { return static_cast<std::size_t>(mx_) * my_ * mz_; }
  void apply(std::span<const double> x, std::span<double> y) const {
    kernels::stencil27_apply(view_, x, y);
  }

 private:
  GridDims d_;
  int mx_, my_, mz_;
  std::array<std::vector<double>, 27> coef_;
  kernels::Stencil27View view_;
};

// Exact inverse of Mz⊗K2[T] + Kz⊗M2[c₃₃] with T the symmetric transversal
// block and c₃₃ the axial entry of each column: sine modes in z decouple the
// operator into one 2D solve per mode.
class ZModePreconditioner {
 public:
  ZModePreconditioner(const std::vector<Mat3>& columns, GridDims d)
      : mx_(d.nx - 1), my_(d.ny - 1), mz_(d.nz - 1) {
    const double hx = 1.0 / d.nx, hy = 1.0 / d.ny, hz = 1.0 / d.nz;
    const int m2 = mx_ * my_;
    std::vector<Triplet> k2, m2t;
    for (int ej = 0; ej < d.ny; ++ej) {
      for (int ei = 0; ei < d.nx; ++ei) {
        const Mat3& s = columns[static_cast<std::size_t>(ej) * d.nx + ei];
        const Mat2 t = transversal_block(s).symmetric_part();
        const fem::ElementMatrix2 ke = fem::stiffness_2d(t, hx, hy);
        const fem::ElementMatrix2 me = fem::mass_2d(s(2, 2), hx, hy);
        for (int a = 0; a < 4; ++a) {
          const int ai = ei + (a & 1) - 1, aj = ej + (a >> 1) - 1;
          if (ai < 0 || ai >= mx_ || aj < 0 || aj >= my_) continue;
          for (int b = 0; b < 4; ++b) {
            const int bi = ei + (b & 1) - 1, bj = ej + (b >> 1) - 1;
            if (bi < 0 || bi >= mx_ || bj < 0 || bj >= my_) continue;
            k2.push_back({aj * mx_ + ai, bj * mx_ + bi, ke[a * 4 + b]});
            m2t.push_back({aj * mx_ + ai, bj * mx_ + bi, me[a * 4 + b]});
          }
        }
      }
    }
    modes_.resize(mz_, mz_);
    factors_.reserve(mz_);
    const double pi = std::acos(-1.0);
    for (int k = 0; k < mz_; ++k) {
      const double theta = (k + 1) * pi / d.nz;
      const double c = std::cos(theta);
      const double mu = 6.0 * (1.0 - c) / (hz * hz * (2.0 + c));
      const double norm = std::sqrt(hz / 6.0 * (4.0 + 2.0 * c) * (d.nz / 2.0));
      for (int z = 0; z < mz_; ++z) modes_(z, k) = std::sin((z + 1) * theta) / norm;
      std::vector<Triplet> shifted = k2;
      for (const Triplet& t : m2t) shifted.push_back({t.row, t.col, mu * t.value});
      factors_.emplace_back(m2, shifted, false);
    }
  }

  void apply(std::span<const double> r, std::span<double> z) const {
    const int m2 = mx_ * my_;
    Eigen::Map<const Eigen::MatrixXd> rm(r.data(), m2, mz_);
    Eigen::MatrixXd hat = rm * modes_;
    Eigen::MatrixXd sol(m2, mz_);
    for (int k = 0; k < mz_; ++k)
      factors_[k].solve(std::span<const double>(hat.col(k).data(), m2),
                        std::span<double>(sol.col(k).data(), m2));
    Eigen::Map<Eigen::MatrixXd> zm(z.data(), m2, mz_);
    zm.noalias() = sol * modes_.transpose();
  }

 private:
  int mx_, my_, mz_;
  Eigen::MatrixXd modes_;
  std::vector<SymmetricFactor> factors_;
};

// ∫ P(x) φ_I(x) dx for the hat functions of a uniform grid with n cells.
std::vector<double> hat_moments(const std::vector<double>& poly, int n) {
  static constexpr std::array<double, 5> gx = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> gw = {0.2369268850561891, 0.4786286704993665,
                                               0.5688888888888889, 0.4786286704993665,
                                               0.2369268850561891};
  const double h = 1.0 / n;
  std::vector<double> out(n + 1, 0.0);
  for (int e = 0; e < n; ++e) {
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double s = 0.5 * (gx[q] + 1.0);
      const double w = 0.5 * h * gw[q] * SeparablePolynomial::eval(poly, (e + s) * h);
      out[e] += w * (1.0 - s);
      out[e + 1] += w * s;
    }
  }
  return out;
}

void check_dims(GridDims d) {
  if (d.nx < 2 || d.ny < 2 || d.nz < 2) throw ValidationError("macro grid needs >= 2 cells per side");
  if (d.nx > kMaxMacroCells || d.ny > kMaxMacroCells || d.nz > kMaxMacroCells)
    throw ValidationError("macro grid exceeds 48 cells per side");
}

}  // namespace

MacroSolution solve_columnar(const ColumnCoefficient& sigma, const SeparablePolynomial& f,
                             GridDims dims, const MacroSettings& settings) {
  check_dims(dims);
  std::vector<Mat3> columns(static_cast<std::size_t>(dims.nx) * dims.ny);
  for (int j = 0; j < dims.ny; ++j)
    for (int i = 0; i < dims.nx; ++i)
      columns[static_cast<std::size_t>(j) * dims.nx + i] =
          sigma(Vec2{(i + 0.5) / dims.nx, (j + 0.5) / dims.ny});

  const ColumnarOperator op(columns, dims);
  const ZModePreconditioner pre(columns, dims);
  const int mx = dims.nx - 1, my = dims.ny - 1, mz = dims.nz - 1;

  const std::vector<double> fx = hat_moments(f.px, dims.nx);
  const std::vector<double> fy = hat_moments(f.py, dims.ny);
  const std::vector<double> fz = hat_moments(f.pz, dims.nz);
  std::vector<double> b(op.size());
  for (int k = 0; k < mz; ++k)
    for (int j = 0; j < my; ++j)
      for (int i = 0; i < mx; ++i)
        b[(static_cast<std::size_t>(k) * my + j) * mx + i] = fx[i + 1] * fy[j + 1] * fz[k + 1];

  const LinearOperator a{op.size(), [&op](std::span<const double> x, std::span<double> y) {
                           op.apply(x, y);
                         }};
  KrylovOptions opt;
  opt.rtol = settings.rtol;
  opt.restart = settings.restart;
  opt.max_iterations = settings.max_iterations;
  std::vector<double> x(op.size(), 0.0);
  const KrylovResult res =
      fgmres(a, b, x, [&pre](std::span<const double> r, std::span<double> z) { pre.apply(r, z); },
             opt);
  if (!res.converged) {
    std::ostringstream msg;
    msg << "macro solve did not converge: relative residual " << res.relative_residual;
    throw SolverError(msg.str(), res.relative_residual, res.iterations);
  }

  MacroSolution sol;
  sol.dims = dims;
  sol.residual = res.relative_residual;
  sol.iterations = res.iterations;
  std::vector<double> ax(op.size());
  op.apply(x, ax);
  sol.energy = kernels::dot(x, ax);
  sol.load = kernels::dot(x, b);
  sol.u.assign(dims.node_count(), 0.0);
  for (int k = 0; k < mz; ++k)
    for (int j = 0; j < my; ++j)
      for (int i = 0; i < mx; ++i)
        sol.u[(static_cast<std::size_t>(k + 1) * (dims.ny + 1) + (j + 1)) * (dims.nx + 1) + i + 1] =
            x[(static_cast<std::size_t>(k) * my + j) * mx + i];
  return sol;
}

MacroSolution solve_fine(const MacroProblem& problem, GridDims dims,
                         const MacroSettings& settings) {
  problem.validate();
  check_dims(dims);
  const double feature = problem.cell.kind() == CellGeometry::Kind::custom
                             ? 0.5
                             : problem.cell.parameter();
  for (int n : {dims.nx, dims.ny}) {
    const double per_period = n * problem.epsilon;
    if (std::abs(per_period - std::round(per_period)) > 1e-9)
      throw ValidationError("grid does not fit an integer number of cells per period");
    if (2.0 * feature * per_period < 2.0 - 1e-9)
      throw ValidationError("grid puts fewer than two cells across the inclusion");
  }
  return solve_columnar([&problem](Vec2 x) { return problem.sigma_at(x); }, problem.f, dims,
                        settings);
}

MacroSolution solve_homogenized(const EffectiveTensor& sigma_star, const SeparablePolynomial& f,
                                GridDims dims, const MacroSettings& settings) {
  return solve_homogenized([&sigma_star](Vec2) { return sigma_star; }, f, dims, settings);
}

MacroSolution solve_homogenized(const std::function<EffectiveTensor(Vec2)>& sigma_star,
                                const SeparablePolynomial& f, GridDims dims,
                                const MacroSettings& settings) {
  return solve_columnar(
      [&sigma_star](Vec2 x) {
        const Mat3 s = sigma_star(x).matrix();
        if (!(s.min_symmetric_eigenvalue() > 0.0))
          throw ValidationError("homogenized tensor is not coercive");
        return s;
      },
      f, dims, settings);
}

namespace {

// Cell-centered value and gradient of the trilinear interpolant.
struct CellSample {
  double value;
  Vec3 grad;
};

CellSample sample_cell(const MacroSolution& s, int ratio, int ci, int cj, int ck, GridDims coarse) {
  double corner[8];
  for (int c = 0; c < 8; ++c)
    corner[c] = s.at((ci + (c & 1)) * ratio, (cj + ((c >> 1) & 1)) * ratio,
                     (ck + ((c >> 2) & 1)) * ratio);
  CellSample out{0.0, {}};
  for (double v : corner) out.value += 0.125 * v;
  for (int c = 0; c < 8; ++c) {
    const double sx = (c & 1) ? 1.0 : -1.0;
    const double sy = ((c >> 1) & 1) ? 1.0 : -1.0;
    const double sz = ((c >> 2) & 1) ? 1.0 : -1.0;
    out.grad.x += 0.25 * sx * corner[c] * coarse.nx;
    out.grad.y += 0.25 * sy * corner[c] * coarse.ny;
    out.grad.z += 0.25 * sz * corner[c] * coarse.nz;
  }
  return out;
}

int refinement(int fine, int coarse) {
  if (fine % coarse != 0) throw ValidationError("incompatible macro grids");
  return fine / coarse;
}

}  // namespace

ErrorMetrics compare(const MacroSolution& a, const MacroSolution& b) {
  GridDims coarse{std::min(a.dims.nx, b.dims.nx), std::min(a.dims.ny, b.dims.ny),
                  std::min(a.dims.nz, b.dims.nz)};
  const int ra = refinement(a.dims.nx, coarse.nx);
  const int rb = refinement(b.dims.nx, coarse.nx);
  if (refinement(a.dims.ny, coarse.ny) != ra || refinement(a.dims.nz, coarse.nz) != ra ||
      refinement(b.dims.ny, coarse.ny) != rb || refinement(b.dims.nz, coarse.nz) != rb)
    throw ValidationError("incompatible macro grids");

  double l2 = 0, h1 = 0, l2_ref = 0, h1_ref = 0;
  for (int k = 0; k < coarse.nz; ++k) {
    for (int j = 0; j < coarse.ny; ++j) {
      for (int i = 0; i < coarse.nx; ++i) {
        const CellSample sa = sample_cell(a, ra, i, j, k, coarse);
        const CellSample sb = sample_cell(b, rb, i, j, k, coarse);
        const double dv = sa.value - sb.value;
        const Vec3 dg = sa.grad - sb.grad;
        l2 += dv * dv;
        h1 += dot(dg, dg);
        l2_ref += sb.value * sb.value;
        h1_ref += dot(sb.grad, sb.grad);
      }
    }
  }
  const double vol = 1.0 / (static_cast<double>(coarse.nx) * coarse.ny * coarse.nz);
  ErrorMetrics m;
  m.l2 = std::sqrt(l2 * vol);
  m.h1 = std::sqrt(h1 * vol);
  m.l2_relative = l2_ref > 0.0 ? std::sqrt(l2 / l2_ref) : m.l2;
  m.h1_relative = h1_ref > 0.0 ? std::sqrt(h1 / h1_ref) : m.h1;
  return m;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(bytes, 4);
}

void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  out.write(bytes, 8);
}

std::uint64_t get_bytes(std::istream& in, int count) {
  unsigned char bytes[8] = {};
  if (!in.read(reinterpret_cast<char*>(bytes), count))
    throw ValidationError("truncated binary grid");
  std::uint64_t v = 0;
  for (int i = count - 1; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

}  // namespace

void write_binary(std::ostream& out, const MacroSolution& sol) {
  put_u32(out, static_cast<std::uint32_t>(sol.dims.nx + 1));
  put_u32(out, static_cast<std::uint32_t>(sol.dims.ny + 1));
  put_u32(out, static_cast<std::uint32_t>(sol.dims.nz + 1));
  for (double v : sol.u) put_f64(out, v);
}

MacroSolution read_binary(std::istream& in) {
  MacroSolution sol;
  sol.dims.nx = static_cast<int>(get_bytes(in, 4)) - 1;
  sol.dims.ny = static_cast<int>(get_bytes(in, 4)) - 1;
  sol.dims.nz = static_cast<int>(get_bytes(in, 4)) - 1;
  if (sol.dims.nx < 1 || sol.dims.ny < 1 || sol.dims.nz < 1)
    throw ValidationError("bad binary grid header");
  sol.u.resize(sol.dims.node_count());
  for (double& v : sol.u) v = std::bit_cast<double>(get_bytes(in, 8));
  return sol;
}

std::string metadata_json(const MacroSolution& sol, const std::string& label) {
  nlohmann::json j = {{"label", label},
                      {"nodes", {sol.dims.nx + 1, sol.dims.ny + 1, sol.dims.nz + 1}},
                      {"spacing", {1.0 / sol.dims.nx, 1.0 / sol.dims.ny, 1.0 / sol.dims.nz}},
                      {"layout", "x fastest, then y, then z; little-endian float64"},
                      {"header", "3 x uint32 node counts"},
                      {"residual", sol.residual},
                      {"iterations", sol.iterations},
                      {"energy", sol.energy},
                      {"load", sol.load},
                      {"energy_defect", sol.energy_defect()}};
  return j.dump(2);
}

}  // namespace hallhom
