#pragma once

// Fast invariant suite shared by the `verify` subcommand and the tests.

#include <cstdint>
#include <string>
#include <vector>

namespace hallhom {

struct InvariantResult {
  std::string name;
  bool passed = false;
  /// Worst observed value of the checked quantity.
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyOptions {
  int resolution = 32;
  std::uint64_t seed = 20240611;
  bool fail_fast = true;
  int parallelism = 1;
};

/// Runs every check in order; with fail_fast the list ends at the first failure.
std::vector<InvariantResult> run_invariant_suite(const VerifyOptions& options = {});

}  // namespace hallhom
