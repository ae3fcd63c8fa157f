#pragma once

#include <cstddef>
#include <cstdlib>
#include <string>
#include <vector>

namespace caustica {

/// One point (lambda, n) of the joint spectrum, with radial index k and
/// Clairaut parameter mu = |n| / lambda.
struct JointEigenvalue {
  double lambda = 0.0;
  int n = 0;
  int k = 0;
  double mu = 0.0;
};

inline JointEigenvalue make_joint_eigenvalue(double lambda, int n, int k) {
  return {lambda, n, k, std::abs(n) / lambda};
}

enum class Exec { serial, parallel };

/// A finite family of joint eigenfunctions on a rotationally symmetric
/// surface. Points are given by their radial chart coordinate (r on the
/// disk, arclength s on a surface of revolution); |phi|^2 is independent of
/// the angle.
class ModeFamily {
 public:
  virtual ~ModeFamily() = default;

  virtual std::size_t size() const = 0;
  virtual const JointEigenvalue& eigenvalue(std::size_t i) const = 0;
  /// 2 when the mode stands for the pair +-n, 1 for n = 0.
  virtual int multiplicity(std::size_t i) const = 0;
  virtual double eigenfunction_sq(std::size_t i, double x) const = 0;
  /// Chart coordinates of the caustic circles for parameter mu.
  virtual std::vector<double> caustic_points(double mu) const = 0;
  /// Distance from x to the caustic set of parameter mu.
  virtual double caustic_distance(double mu, double x) const = 0;
  /// True on the shadow side of the caustic of mu (|n| larger than the
  /// local radius times the frequency allows).
  virtual bool forbidden(double mu, double x) const = 0;
  /// Fold-type caustics exist only for 0 < mu < sup a (1 on the disk).
  virtual double mu_max() const = 0;
  virtual std::string surface_id() const = 0;
};

}  // namespace caustica
