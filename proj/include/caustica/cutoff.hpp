#pragma once

namespace caustica {

/// Smooth even cutoff: 1 on [-plateau, plateau], 0 off (-support, support),
/// with the transition h(u) = g(u) / (g(u) + g(1 - u)), g(u) = exp(-1/u).
class Cutoff {
 public:
  Cutoff() = default;
  Cutoff(double plateau, double support);

  double operator()(double t) const noexcept;

  double plateau() const noexcept { return plateau_; }
  double support() const noexcept { return support_; }

 private:
  double plateau_ = 1.0;
  double support_ = 2.0;
};

}  // namespace caustica
