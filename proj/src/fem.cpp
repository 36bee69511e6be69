#include "hallhom/fem.hpp"

#include <utility>

namespace hallhom::fem {

namespace {

// 1D linear element on [0, h]: ℓ₀ = 1 − s/h, ℓ₁ = s/h.
struct Line {
  double mass[2][2];   // ∫ ℓ_a ℓ_b
  double deriv[2][2];  // ∫ ℓ'_a ℓ_b
  double stiff[2][2];  // ∫ ℓ'_a ℓ'_b

  explicit Line(double h)
      : mass{{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}},
        deriv{{-0.5, -0.5}, {0.5, 0.5}},
        stiff{{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}} {}

  // ∫ (∂ if da) ℓ_a · (∂ if db) ℓ_b
  double factor(bool da, bool db, int a, int b) const {
    if (da && db) return stiff[a][b];
    if (da) return deriv[a][b];
    if (db) return deriv[b][a];
    return mass[a][b];
  }
};

template <int Dim, class Coef>
std::array<double, (1 << Dim) * (1 << Dim)> tensor_stiffness(const Coef& a,
                                                            const std::array<double, Dim>& h) {
  constexpr int nodes = 1 << Dim;
  std::array<Line, Dim> lines = [&]<std::size_t... I>(std::index_sequence<I...>) {
    return std::array<Line, Dim>{Line(h[I])...};
  }(std::make_index_sequence<Dim>{});
  std::array<double, nodes * nodes> k{};
  for (int ai = 0; ai < nodes; ++ai) {
    for (int bi = 0; bi < nodes; ++bi) {
      double acc = 0.0;
      // Σ_pq A_pq ∫ ∂_q φ_b ∂_p φ_a
      for (int p = 0; p < Dim; ++p) {
        for (int q = 0; q < Dim; ++q) {
          const double apq = a(p, q);
          if (apq == 0.0) continue;
          double g = 1.0;
          for (int d = 0; d < Dim; ++d) {
            const int la = (ai >> d) & 1;
            const int lb = (bi >> d) & 1;
            g *= lines[d].factor(p == d, q == d, la, lb);
          }
          acc += apq * g;
        }
      }
      k[ai * nodes + bi] = acc;
    }
  }
  return k;
}

}  // namespace

ElementMatrix2 stiffness_2d(const Mat2& a, double hx, double hy) {
  return tensor_stiffness<2>(a, std::array<double, 2>{hx, hy});
}

ElementMatrix3 stiffness_3d(const Mat3& a, double hx, double hy, double hz) {
  return tensor_stiffness<3>(a, std::array<double, 3>{hx, hy, hz});
}

ElementMatrix2 mass_2d(double w, double hx, double hy) {
  const Line lx(hx), ly(hy);
  ElementMatrix2 m{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      m[a * 4 + b] = w * lx.mass[a & 1][b & 1] * ly.mass[a >> 1][b >> 1];
  return m;
}

std::array<Vec2, 4> gradient_integrals_2d(double hx, double hy) {
  // ∫ ∂x φ_a = ±hy/2, ∫ ∂y φ_a = ±hx/2.
  std::array<Vec2, 4> g{};
  for (int a = 0; a < 4; ++a) {
    const double sx = (a & 1) ? 1.0 : -1.0;
    const double sy = (a >> 1) ? 1.0 : -1.0;
    g[a] = Vec2{0.5 * sx * hy, 0.5 * sy * hx};
  }
  return g;
}

PeriodicOperator::PeriodicOperator(int n) : n_(n) {
  for (auto& c : coef_) c.assign(static_cast<std::size_t>(n) * n, 0.0);
}

void PeriodicOperator::scatter(int i, int j, const ElementMatrix2& k) {
  const int n = n_;
  for (int a = 0; a < 4; ++a) {
    const int ia = (i + (a & 1)) % n;
    const int ja = (j + (a >> 1)) % n;
    const std::size_t node = static_cast<std::size_t>(ja) * n + ia;
    for (int b = 0; b < 4; ++b) {
      const int di = (b & 1) - (a & 1);
      const int dj = (b >> 1) - (a >> 1);
      coef_[(dj + 1) * 3 + (di + 1)][node] += k[a * 4 + b];
    }
  }
}

PeriodicOperator::PeriodicOperator(const PhaseField& field, const TwoPhaseCoefficient& coef)
    : PeriodicOperator(field.resolution()) {
  const double h = 1.0 / n_;
  const ElementMatrix2 k1 = stiffness_2d(coef.matrix_phase, h, h);
  const ElementMatrix2 k2 = stiffness_2d(coef.inclusion_phase, h, h);
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i) scatter(i, j, field.inclusion(i, j) ? k2 : k1);
}

PeriodicOperator PeriodicOperator::mass(const PhaseField& field, double w1, double w2) {
  PeriodicOperator op(field.resolution());
  const double h = 1.0 / op.n_;
  const ElementMatrix2 m1 = mass_2d(w1, h, h);
  const ElementMatrix2 m2 = mass_2d(w2, h, h);
  for (int j = 0; j < op.n_; ++j)
    for (int i = 0; i < op.n_; ++i) op.scatter(i, j, field.inclusion(i, j) ? m2 : m1);
  return op;
}

void PeriodicOperator::apply(std::span<const double> x, std::span<double> y) const {
  kernels::stencil9_apply(view(), x, y);
}

std::vector<Triplet> PeriodicOperator::triplets() const {
  std::vector<Triplet> out;
  out.reserve(9 * size());
  const int n = n_;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int row = j * n + i;
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const double v = coef_[(dj + 1) * 3 + (di + 1)][static_cast<std::size_t>(row)];
          if (v == 0.0) continue;
          const int col = ((j + dj + n) % n) * n + (i + di + n) % n;
          out.push_back({row, col, v});
        }
      }
    }
  }
  return out;
}

std::vector<double> PeriodicOperator::diagonal() const { return coef_[4]; }

kernels::Stencil9View PeriodicOperator::view() const {
  kernels::Stencil9View v;
  v.n = n_;
  for (int s = 0; s < 9; ++s) v.coef[s] = coef_[s].data();
  return v;
}

std::vector<double> affine_load(const PhaseField& field, const TwoPhaseCoefficient& coef,
                                Vec2 lambda) {
  const Vec2 f1 = coef.matrix_phase * lambda;
  const Vec2 f2 = coef.inclusion_phase * lambda;
  std::vector<double> rhs = flux_source_load(field, f1, f2);
  for (double& v : rhs) v = -v;
  return rhs;
}

std::vector<double> flux_source_load(const PhaseField& field, Vec2 v_matrix, Vec2 v_inclusion) {
  const int n = field.resolution();
  const double h = 1.0 / n;
  const auto g = gradient_integrals_2d(h, h);
  std::vector<double> rhs(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 v = field.inclusion(i, j) ? v_inclusion : v_matrix;
      for (int a = 0; a < 4; ++a) {
        const int ia = (i + (a & 1)) % n;
        const int ja = (j + (a >> 1)) % n;
        rhs[static_cast<std::size_t>(ja) * n + ia] += dot(v, g[a]);
      }
    }
  }
  return rhs;
}

Vec2 element_gradient(std::span<const double> w, int n, int i, int j) {
  const int ip = (i + 1) % n;
  const int jp = (j + 1) % n;
  const auto at = [&](int a, int b) { return w[static_cast<std::size_t>(b) * n + a]; };
  const double w00 = at(i, j), w10 = at(ip, j), w01 = at(i, jp), w11 = at(ip, jp);
  // Average of the bilinear gradient over the element.
  return Vec2{0.5 * n * ((w10 - w00) + (w11 - w01)), 0.5 * n * ((w01 - w00) + (w11 - w10))};
}

}  // namespace hallhom::fem
