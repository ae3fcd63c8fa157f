#pragma once

// Simple metrics of revolution ds^2 + a(s)^2 dtheta^2 on the sphere: profile
// handling, a finite-volume radial eigensolver, Clairaut caustics and the
// inflection diagnostic of the action curve.

#include <array>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "caustica/cutoff.hpp"
#include "caustica/spectrum.hpp"

namespace caustica {

class ResultCache;

class RevolutionProfile {
 public:
  using Fn = std::function<double(double)>;

  /// `a`, `da`, `dda` are a, a', a'' on [0, L]. The maximum A and its
  /// location are located numerically; no validation happens here.
  RevolutionProfile(std::string id, double L, Fn a, Fn da, Fn dda);

  /// a(s) = sin s on [0, pi].
  static RevolutionProfile round();
  /// a(s) = sin s + eps sin 2s on [0, pi].
  static RevolutionProfile perturbed(double eps);
  /// Rows (s, a, a', a''), s strictly increasing from 0; piecewise quintic
  /// Hermite interpolation of a, cubic of a', linear of a''.
  static RevolutionProfile from_table(std::string id, std::vector<std::array<double, 4>> rows);
  static RevolutionProfile from_csv(const std::filesystem::path& file);
  /// "round", "perturbed(EPS)" or "table:PATH".
  static RevolutionProfile from_spec(const std::string& spec);

  double a(double s) const { return a_(s); }
  double da(double s) const { return da_(s); }
  double dda(double s) const { return dda_(s); }
  double L() const noexcept { return L_; }
  double A() const noexcept { return A_; }
  double s_max() const noexcept { return s_max_; }
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
  double L_;
  Fn a_, da_, dda_;
  double A_ = 0.0;
  double s_max_ = 0.0;
};

struct ProfileReport {
  bool ok = true;
  /// One entry per violated clause, e.g. "positivity: a(1.5708) = 0 <= 0".
  std::vector<std::string> failures;
  std::size_t grid_points = 0;
};

/// Checks a(0) = a(L) = 0, a > 0 inside, a single critical point which is a
/// nondegenerate maximum, on a uniform grid of `grid_points` points.
ProfileReport validate_profile(const RevolutionProfile& profile, std::size_t grid_points = 20000);

struct RadialOptions {
  /// Number of cells on [0, L]; even when extrapolating.
  std::size_t grid_points = 8000;
  /// Cells with |n| / a(s) > factor * hi are dropped (beyond the WKB margin below).
  double truncation_factor = 2.0;
  /// Keep at least this much under-barrier WKB action before truncating.
  double truncation_action = 40.0;
  /// Combine eigenvalues from N and N/2 cells to cancel the h^2 error term.
  bool richardson = true;
  /// Refuse when hi * h exceeds this.
  double max_lambda_h = 0.1;
};

/// Cell-centred samples of a profile: s_i = (i + 1/2) h, faces at i h.
struct RadialGrid {
  std::size_t cells = 0;
  double h = 0.0;
  std::vector<double> a_center;
  std::vector<double> a_face;  ///< cells + 1 entries
};
RadialGrid make_radial_grid(const RevolutionProfile& profile, std::size_t cells);

/// Symmetric tridiagonal discretization of the radial operator in the
/// variable w = a^{1/2} psi: finite volumes for -(a psi')' + (n^2/a) psi =
/// lambda^2 a psi, with zero flux where a vanishes and psi = 0 beyond the
/// truncated range.
class RadialOperator {
 public:
  RadialOperator(const RadialGrid& grid, int n, double hi, const RadialOptions& options);

  std::size_t size() const noexcept { return diag_.size(); }
  std::size_t first_cell() const noexcept { return first_; }
  double h() const noexcept { return h_; }
  const std::vector<double>& diag() const noexcept { return diag_; }
  const std::vector<double>& off() const noexcept { return off_; }

  /// Number of eigenvalues strictly below x (Sturm sequence).
  std::size_t count_below(double x) const;
  /// The index-th smallest eigenvalue (0-based) by bisection.
  double eigenvalue(std::size_t index) const;
  /// Eigenvalues i0 .. i1-1, all known to lie in [lo, hi]: shared-bracket
  /// bisection to relative width 1e-9, then one Rayleigh quotient.
  std::vector<double> eigenvalues(std::size_t i0, std::size_t i1, double lo, double hi) const;
  /// Inverse iteration at shift `lambda_sq`; normalized to sum w^2 h = 1.
  std::vector<double> eigenvector(double lambda_sq) const;
  std::vector<double> apply(const std::vector<double>& w) const;

 private:
  std::vector<double> diag_, off_, off_sq_;
  std::size_t first_ = 0;
  double h_ = 0.0;
  double lower_ = 0.0, upper_ = 0.0;  // Gershgorin bounds
};

struct RevolutionMode {
  JointEigenvalue nu;
  /// Eigenvalue of the fine-grid operator (lambda^2, before extrapolation).
  double lambda_sq_grid = 0.0;
  /// Radial eigenvector w on cells first_cell .. first_cell + w.size() - 1, sum w^2 h = 1.
  std::vector<double> w;
  /// psi = w / sqrt(a) on the same cells.
  std::vector<double> psi;
  std::size_t first_cell = 0;
  double h = 0.0;
  std::size_t grid_cells = 0;
};

/// Eigenpairs with lo <= lambda <= hi (lo may be 0). |n| >= A * hi gives an
/// empty result; hi * h > max_lambda_h throws ResolutionError.
std::vector<RevolutionMode> radial_spectrum(const RevolutionProfile& profile, int n, double lo,
                                            double hi, const RadialOptions& options = {},
                                            ResultCache* cache = nullptr);
std::vector<RevolutionMode> radial_spectrum(const RevolutionProfile& profile, const RadialGrid& fine,
                                            const RadialGrid* coarse, int n, double lo, double hi,
                                            const RadialOptions& options, ResultCache* cache);

struct RevBandOptions {
  RadialOptions radial;
  /// Smallest |n| included; n = 0 has no fold caustic.
  int n_min = 0;
  ResultCache* cache = nullptr;
  Exec exec = Exec::serial;
};

/// Modes with |lambda_nu - lambda| < support * delta and n_min <= n <= (A - cone_eps)(lambda + support * delta).
std::vector<RevolutionMode> rev_band_spectrum(const RevolutionProfile& profile, double lambda,
                                              double delta, const Cutoff& cutoff, double cone_eps,
                                              const RevBandOptions& options = {});

/// |phi(s, theta)|^2 = psi(s)^2 / (2 pi), psi interpolated by cubics through
/// neighbouring cell centres; 0 outside the truncated range.
double rev_eigenfunction_sq(const RevolutionMode& mode, double s);

/// Solutions s_- < s_max < s_+ of a(s) = mu, 0 < mu < A.
std::pair<double, double> rev_caustics(const RevolutionProfile& profile, double mu);

/// I_1(mu) = (1/pi) int_{a >= mu} sqrt(1 - mu^2/a^2) ds and its derivative.
double action_integral(const RevolutionProfile& profile, double mu);
double action_integral_derivative(const RevolutionProfile& profile, double mu);

enum class Genericity { generic, degenerate, degenerate_flat, inconclusive };
std::string to_string(Genericity g);

struct CurvatureZero {
  double mu = 0.0;
  double dkappa = 0.0;
  bool nondegenerate = false;
};

struct GenericityReport {
  Genericity verdict = Genericity::inconclusive;
  double kappa_max = 0.0;
  std::vector<CurvatureZero> zeros;
  std::vector<double> mu, action, kappa;
  bool action_decreasing = true;
};

struct GenericityOptions {
  std::size_t samples = 400;
  /// Sampled mu range as fractions of A.
  double mu_lo = 0.02, mu_hi = 0.98;
  double zero_threshold = 1e-10;     ///< relative to max |kappa|
  double slope_threshold = 1e-6;     ///< |dkappa/dmu| relative to max |kappa| / A
  double flat_threshold = 1e-7;      ///< absolute noise floor for max |kappa|
};

/// Inflection points of the curve {(I_1(mu), mu)}.
GenericityReport genericity_check(const RevolutionProfile& profile, const GenericityOptions& options = {});

class RevolutionModes final : public ModeFamily {
 public:
  RevolutionModes(RevolutionProfile profile, std::vector<RevolutionMode> modes)
      : profile_(std::move(profile)), modes_(std::move(modes)) {}

  std::size_t size() const override { return modes_.size(); }
  const JointEigenvalue& eigenvalue(std::size_t i) const override { return modes_[i].nu; }
  int multiplicity(std::size_t i) const override { return modes_[i].nu.n == 0 ? 1 : 2; }
  double eigenfunction_sq(std::size_t i, double s) const override {
    return rev_eigenfunction_sq(modes_[i], s);
  }
  std::vector<double> caustic_points(double mu) const override;
  double caustic_distance(double mu, double s) const override;
  bool forbidden(double mu, double s) const override { return profile_.a(s) < mu; }
  double mu_max() const override { return profile_.A(); }
  std::string surface_id() const override { return "revolution:" + profile_.id(); }

  const RevolutionProfile& profile() const noexcept { return profile_; }
  const std::vector<RevolutionMode>& modes() const noexcept { return modes_; }

 private:
  RevolutionProfile profile_;
  std::vector<RevolutionMode> modes_;
};

}  // namespace caustica
