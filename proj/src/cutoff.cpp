#include "caustica/cutoff.hpp"

#include <cmath>

#include "caustica/errors.hpp"

namespace caustica {
namespace {

double g(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

double transition(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = g(u);
  return a / (a + g(1.0 - u));
}

}  // namespace

Cutoff::Cutoff(double plateau, double support) : plateau_(plateau), support_(support) {
  if (!(plateau > 0.0) || !(support > plateau) || !std::isfinite(support))
    throw DomainError("Cutoff: need 0 < plateau < support");
}

double Cutoff::operator()(double t) const noexcept {
  const double a = std::fabs(t);
  if (a <= plateau_) return 1.0;
  if (a >= support_) return 0.0;
  return transition((support_ - a) / (support_ - plateau_));
}

}  // namespace caustica
