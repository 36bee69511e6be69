#pragma once

#include <memory>
#include <span>
#include <vector>

namespace hallhom {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Sparse LDLᵀ factorization of a symmetric positive (semi)definite matrix.
/// With `pin_first` the first unknown is removed, which turns a periodic
/// operator with a constant null space into an SPD one; solve() then returns
/// the mean-zero solution of any right-hand side with zero sum.
class SymmetricFactor {
 public:
  SymmetricFactor(int size, const std::vector<Triplet>& entries, bool pin_first);
  ~SymmetricFactor();
  SymmetricFactor(SymmetricFactor&&) noexcept;
  SymmetricFactor& operator=(SymmetricFactor&&) noexcept;

  int size() const noexcept { return size_; }
  void solve(std::span<const double> rhs, std::span<double> out) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int size_;
  bool pinned_;
};

}  // namespace hallhom
