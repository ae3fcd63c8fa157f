#pragma once

// Invariant suite for the special functions, run by the command-line tool and
// the acceptance tests.

#include <ostream>
#include <string>
#include <vector>

namespace caustica {

struct CheckResult {
  std::string name;
  double value = 0.0;      ///< measured quantity (error, residual or slope)
  double threshold = 0.0;  ///< pass iff value <= threshold
  bool pass = false;
};

/// Zero and value oracles, Airy ODE and Bessel recurrence residuals, zero
/// residuals and the Olver slope. Deterministic.
std::vector<CheckResult> specfun_checks();

void print_checks(const std::vector<CheckResult>& checks, std::ostream& out);

}  // namespace caustica
