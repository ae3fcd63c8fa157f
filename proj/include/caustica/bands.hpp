#pragma once

// Bands of the joint spectrum at level lambda and width delta, with the
// lattice, caustic-spacing and zero-asymptotics diagnostics run on them.

#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "caustica/cutoff.hpp"
#include "caustica/spectrum.hpp"

namespace caustica {

/// mu = |n| / lambda_nu (per mode) or |n| / lambda (per level).
enum class MuNormalization { per_mode, per_level };
std::string to_string(MuNormalization m);

struct BandEntry {
  JointEigenvalue nu;
  double weight = 0.0;  ///< cutoff((lambda_nu - lambda) / delta)^2
  int multiplicity = 1;
  std::size_t source_index = 0;  ///< index in the ModeFamily the band was built from
};

struct Band {
  double lambda = 0.0;
  double delta = 0.0;
  std::string surface_id;
  std::vector<BandEntry> entries;
  /// Distinct per-mode caustic parameters, ascending, with summed multiplicities.
  std::vector<double> mus;
  std::vector<int> mu_counts;

  /// Number of eigenfunctions (multiplicities included).
  std::size_t cardinality() const;
  /// Sorted caustic parameters, one per entry, in the requested normalization.
  std::vector<double> caustic_parameters(MuNormalization norm) const;
};

/// Weights every mode of `source` and keeps those with positive weight.
Band assemble_band(const ModeFamily& source, double lambda, double delta, const Cutoff& cutoff);

/// Builds a band from explicit entries (synthetic inputs, tests).
Band make_band(double lambda, double delta, std::string surface_id, std::vector<BandEntry> entries);

struct GapReport {
  bool injective = true;
  std::size_t checked = 0;
  /// min |n1 - n2| over distinct entries; max int when fewer than two.
  int min_separation = std::numeric_limits<int>::max();
  std::vector<int> repeated_n;
};

/// Injectivity of mode -> n over entries with |n| <= cone * lambda.
GapReport check_gap(const Band& band, double cone);

struct SpacingReport {
  std::size_t count = 0;
  bool trivial = false;  ///< fewer than two caustics in the region
  double min_gap = std::numeric_limits<double>::infinity();
  double scale = 0.0;     ///< the gap is divided by this
  double normalized = std::numeric_limits<double>::infinity();
  double mu_lo = 0.0, mu_hi = 0.0;
  MuNormalization normalization = MuNormalization::per_mode;
};

/// Minimum gap between adjacent distinct mu in [mu_lo, mu_hi], normalized by 1/lambda.
SpacingReport check_caustic_spacing(const Band& band, double mu_lo, double mu_hi,
                                    MuNormalization norm = MuNormalization::per_mode);
/// Same on the boundary window [1 - 2 eps, 1 - eps/2], normalized by lambda^{-1} eps^{-1/2}.
SpacingReport check_boundary_spacing(const Band& band, double eps,
                                     MuNormalization norm = MuNormalization::per_mode);

struct ZeroAsymptoticsReport {
  std::size_t checked = 0;
  int n_min = 0;
  double max_residual = 0.0;        ///< max |lambda - n - n F(a_k / n^{2/3})|
  double max_residual_times_n = 0.0;
  double bound = 0.0;               ///< C / n_min
  bool residual_ok = true;
  double max_argument = 0.0;        ///< max a_k / n^{2/3}
  /// max over pairs n1 < n2 of n1^{1/3} |a_k1 - a_k2| / (n2 - n1).
  double max_pair_ratio = 0.0;
  bool distinct_airy_indices = true;
};

/// Disk bands only (UnsupportedError otherwise). Entries with n >= cone * lambda
/// are compared with the leading Olver term; `olver_constant` is C.
ZeroAsymptoticsReport check_zero_asymptotics(const Band& band, double cone, double olver_constant);

/// CSV with columns lambda_nu,n,k,mu,weight,multiplicity.
void write_band_csv(const Band& band, std::ostream& out);

}  // namespace caustica
