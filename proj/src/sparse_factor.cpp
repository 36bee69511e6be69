#include "hallhom/sparse_factor.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "hallhom/error.hpp"
#include "hallhom/krylov.hpp"

namespace hallhom {

struct SymmetricFactor::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

SymmetricFactor::SymmetricFactor(int size, const std::vector<Triplet>& entries, bool pin_first)
    : impl_(std::make_unique<Impl>()), size_(size), pinned_(pin_first) {
  const int offset = pin_first ? 1 : 0;
  const int m = size - offset;
  if (m <= 0) throw ValidationError("symmetric factor: empty system");
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(entries.size());
  for (const Triplet& t : entries) {
    if (t.row < offset || t.col < offset) continue;
    trips.emplace_back(t.row - offset, t.col - offset, t.value);
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(trips.begin(), trips.end());
  impl_->ldlt.compute(a);
  if (impl_->ldlt.info() != Eigen::Success)
    throw SolverError("symmetric factorization failed", 0.0, 0);
}

SymmetricFactor::~SymmetricFactor() = default;
SymmetricFactor::SymmetricFactor(SymmetricFactor&&) noexcept = default;
SymmetricFactor& SymmetricFactor::operator=(SymmetricFactor&&) noexcept = default;

void SymmetricFactor::solve(std::span<const double> rhs, std::span<double> out) const {
  const int offset = pinned_ ? 1 : 0;
  const int m = size_ - offset;
  Eigen::Map<const Eigen::VectorXd> b(rhs.data() + offset, m);
  Eigen::VectorXd x = impl_->ldlt.solve(b);
  if (pinned_) out[0] = 0.0;
  for (int i = 0; i < m; ++i) out[i + offset] = x[i];
  if (pinned_) remove_mean(out);
}

}  // namespace hallhom
