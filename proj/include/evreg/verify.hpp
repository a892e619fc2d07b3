#pragma once

// Self-check suite behind `evreg verify`: closed forms against Monte Carlo,
// conjugacy, the rank-one determinant, loss gradients and the degeneration
// invariance.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace evreg {

struct VerifyOptions {
  std::size_t mc_samples = 200000;
  std::size_t mc_cases = 12;
  std::size_t gradient_points = 20;
  std::uint64_t seed = 1;
  /// Perturbs the closed forms under test; every check should then fail.
  bool inject_fault = false;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> run_verification(const VerifyOptions& opts);

}  // namespace evreg
