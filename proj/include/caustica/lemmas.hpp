#pragma once

// Lemma-level checks at a single level: lattice gap, caustic spacing,
// Bessel-zero asymptotics, Airy envelope and the boundary decomposition.

#include <string>
#include <vector>

#include "caustica/sweep.hpp"
#include "json.hpp"

namespace caustica {

enum class Verdict { pass, fail, unsupported };
std::string to_string(Verdict v);

struct LemmaCheck {
  std::string name;
  Verdict verdict = Verdict::pass;
  nlohmann::json detail;
};

struct LemmaReport {
  double lambda = 0.0;
  double delta = 0.0;
  std::string surface;
  std::vector<LemmaCheck> checks;

  /// No check failed (unsupported ones do not count).
  bool pass() const;
  const LemmaCheck& at(const std::string& name) const;
};

/// Thresholds come from caustica/calibration.hpp.
LemmaReport run_lemmas(const SweepConfig& config, double lambda);

nlohmann::json to_json(const LemmaReport& report);

}  // namespace caustica
