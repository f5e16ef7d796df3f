#pragma once

#include <string>
#include <vector>

#include "hombfc/config.hpp"

namespace hombfc {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelfcheckReport {
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;

  bool passed() const;
  /// nullptr when every check passed.
  const CheckResult* first_failure() const;
};

/// Runs the oracle suites against the configured parameters:
///
///   quadrature-accuracy     integrals with known values at the configured tolerances
///   normalization           r2 + r1 + r0 = 1
///   moment-oracle           quadrature Q against the closed form
///   exact-jsa-oracle        full-amplitude coincidence against the closed form
///   marginalization         frequency integrals of the resolved densities
///   derivative-consistency  analytic slopes and Fisher information against finite differences
///   fisher-dominance        F <= Q, F' <= Q, F' >= F
///   simd-equivalence        AVX2 fringe sums against the scalar reference
///
/// When neighbouring modes overlap (cross-term warning) the two oracle
/// suites report the closed-form mismatch as a warning and instead check
/// the quadrature against the Gaussian pair series.
SelfcheckReport run_selfcheck(const RunConfig& config);

}  // namespace hombfc
