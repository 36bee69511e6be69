#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "hallhom/kernels/kernels.hpp"

namespace hallhom::kernels {

namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*xpby)(const double*, double, double*, std::size_t);
  void (*multiply)(const double*, const double*, double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  void (*stencil9)(const Stencil9View&, const double*, double*);
  void (*stencil27)(const Stencil27View&, const double*, double*);
};

constexpr Table kScalar{scalar::dot,      scalar::axpy,     scalar::xpby,     scalar::multiply,
                        scalar::sum,      scalar::stencil9, scalar::stencil27};
#if defined(HALLHOM_HAVE_AVX2_KERNELS)
constexpr Table kAvx2{avx2::dot, avx2::axpy,     avx2::xpby,     avx2::multiply,
                      avx2::sum, avx2::stencil9, avx2::stencil27};
#endif

bool cpu_has_avx2() {
#if defined(HALLHOM_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* table_for(Isa isa) {
#if defined(HALLHOM_HAVE_AVX2_KERNELS)
  if (isa == Isa::avx2) return &kAvx2;
#endif
  return &kScalar;
}

Isa initial_isa() {
  Isa isa = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
  if (const char* env = std::getenv("HALLHOM_ISA")) {
    const std::string v(env);
    if (v == "scalar") isa = Isa::scalar;
    else if (v == "avx2" && cpu_has_avx2()) isa = Isa::avx2;
  }
  return isa;
}

struct State {
  std::atomic<Isa> isa{initial_isa()};
  std::atomic<const Table*> table{table_for(isa.load())};
};

State& state() {
  static State s;
  return s;
}

const Table& active() { return *state().table.load(std::memory_order_acquire); }

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

Isa active_isa() { return state().isa.load(); }

void set_isa(Isa isa) {
  if (!isa_available(isa))
    throw std::invalid_argument("ISA not available: " + std::string(isa_name(isa)));
  state().isa.store(isa);
  state().table.store(table_for(isa), std::memory_order_release);
}

double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), y.size());
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  active().xpby(x.data(), beta, y.data(), y.size());
}

void multiply(std::span<const double> a, std::span<const double> x, std::span<double> y) {
  active().multiply(a.data(), x.data(), y.data(), y.size());
}

double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

void stencil9_apply(const Stencil9View& s, std::span<const double> x, std::span<double> y) {
  active().stencil9(s, x.data(), y.data());
}

void stencil27_apply(const Stencil27View& s, std::span<const double> x, std::span<double> y) {
  active().stencil27(s, x.data(), y.data());
}

}  // namespace hallhom::kernels
