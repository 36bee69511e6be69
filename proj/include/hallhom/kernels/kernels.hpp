#pragma once

// Data-parallel inner loops shared by the Krylov solvers and the stencil
// operators. Each entry point has a portable scalar reference and, on x86-64,
// an AVX2+FMA variant; the variant is chosen once at startup from CPUID and can
// be pinned with HALLHOM_ISA=scalar|avx2.
//
// Stencil layout: a 9-point stencil on a periodic n×n grid stores one
// coefficient array per offset (di, dj) ∈ {−1,0,1}², offset slot
// (dj+1)*3 + (di+1), each array of length n² indexed like the grid (i fastest).
// The 27-point columnar stencil works on the (nx−1)(ny−1)(nz−1) interior nodes
// of a Dirichlet box; its coefficients do not depend on the z index, so each
// of the 27 slots (dk+1)*9 + (dj+1)*3 + (di+1) holds (nx−1)(ny−1) values.

#include <cstddef>
#include <span>
#include <string_view>

namespace hallhom::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
/// ISA compiled in and supported by this CPU.
bool isa_available(Isa isa);
/// Currently active ISA.
Isa active_isa();
/// Force an ISA (tests and benchmarks). Throws std::invalid_argument if unavailable.
void set_isa(Isa isa);

struct Stencil9View {
  int n = 0;
  const double* coef[9] = {};
};

struct Stencil27View {
  int mx = 0;  // interior nodes along x
  int my = 0;
  int mz = 0;
  const double* coef[27] = {};
};

double dot(std::span<const double> a, std::span<const double> b);
/// y ← y + alpha·x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// y ← x + beta·y
void xpby(std::span<const double> x, double beta, std::span<double> y);
/// y ← a ⊙ x (elementwise)
void multiply(std::span<const double> a, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> a);

void stencil9_apply(const Stencil9View& s, std::span<const double> x, std::span<double> y);
void stencil27_apply(const Stencil27View& s, std::span<const double> x, std::span<double> y);

// Per-ISA entry points, exposed for the equivalence tests.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void xpby(const double* x, double beta, double* y, std::size_t n);
void multiply(const double* a, const double* x, double* y, std::size_t n);
double sum(const double* a, std::size_t n);
void stencil9(const Stencil9View& s, const double* x, double* y);
void stencil27(const Stencil27View& s, const double* x, double* y);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define HALLHOM_HAVE_AVX2_KERNELS 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void xpby(const double* x, double beta, double* y, std::size_t n);
void multiply(const double* a, const double* x, double* y, std::size_t n);
double sum(const double* a, std::size_t n);
void stencil9(const Stencil9View& s, const double* x, double* y);
void stencil27(const Stencil27View& s, const double* x, double* y);
}  // namespace avx2
#endif

}  // namespace hallhom::kernels
