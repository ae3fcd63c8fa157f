#pragma once

// Dirichlet eigenmodes of the unit disk: phi = c J_n(lambda r) e^{i n theta}
// with lambda a zero of J_n.

#include <string>
#include <vector>

#include "caustica/cutoff.hpp"
#include "caustica/spectrum.hpp"
#include "caustica/specfun.hpp"

namespace caustica {

class ResultCache;

struct DiskMode {
  JointEigenvalue nu;
  double c = 0.0;  ///< L^2 normalization constant
};

/// c = 1 / (sqrt(pi) |J_{n+1}(lambda_{k,n})|). Throws DomainError when
/// `zero` does not carry indices (n, k), NumericalError when |J_{n+1}| < 1e-300.
double disk_norm_const(int n, int k, const specfun::BesselZero& zero);

/// All modes with |lambda_{k,n} - lambda| < support * delta and
/// n >= n_min_fraction * lambda (n >= 0; n > 0 stands for +-n).
/// Zeros per (n, window) are looked up in / stored to `cache` when given.
std::vector<DiskMode> disk_band_spectrum(double lambda, double delta, const Cutoff& cutoff,
                                         double n_min_fraction, ResultCache* cache = nullptr,
                                         Exec exec = Exec::serial);

/// c^2 J_n(lambda r)^2 for 0 <= r <= 1; 0 outside.
double disk_eigenfunction_sq(const DiskMode& mode, double r);

class DiskModes final : public ModeFamily {
 public:
  explicit DiskModes(std::vector<DiskMode> modes) : modes_(std::move(modes)) {}

  std::size_t size() const override { return modes_.size(); }
  const JointEigenvalue& eigenvalue(std::size_t i) const override { return modes_[i].nu; }
  int multiplicity(std::size_t i) const override { return modes_[i].nu.n == 0 ? 1 : 2; }
  double eigenfunction_sq(std::size_t i, double r) const override {
    return disk_eigenfunction_sq(modes_[i], r);
  }
  std::vector<double> caustic_points(double mu) const override { return {mu}; }
  double caustic_distance(double mu, double r) const override;
  bool forbidden(double mu, double r) const override { return r < mu; }
  double mu_max() const override { return 1.0; }
  std::string surface_id() const override { return "disk"; }

  const std::vector<DiskMode>& modes() const noexcept { return modes_; }

 private:
  std::vector<DiskMode> modes_;
};

}  // namespace caustica
