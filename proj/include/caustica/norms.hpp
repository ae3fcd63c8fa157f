#pragma once

// Pointwise spectral-projector sums S(x) = sum weight * mult * |phi(x)|^2
// over a band, their supremum over a region, the Airy envelope check and the
// three-way split of S near the disk boundary.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "caustica/bands.hpp"
#include "caustica/revolution.hpp"
#include "caustica/spectrum.hpp"
#include "json.hpp"

namespace caustica {

class Region {
 public:
  enum class Kind { disk_annulus, revolution_intervals };

  /// 0 < r_lo < r_hi <= 1.
  static Region disk_annulus(double r_lo, double r_hi);
  /// Intervals of arclength inside [margin, L - margin], each at least
  /// `margin` away from the equator s_max.
  static Region revolution(const RevolutionProfile& profile, std::vector<std::pair<double, double>> intervals,
                           double margin);

  Kind kind() const noexcept { return kind_; }
  const std::vector<std::pair<double, double>>& intervals() const noexcept { return intervals_; }
  bool contains(double x) const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::disk_annulus;
  std::vector<std::pair<double, double>> intervals_;
};

/// Multiples of lambda^{-2/3}/4, every caustic of the band inside
/// the region and offsets +-lambda^{-2/3} {0.5, 1, 2} around it, plus the
/// interval endpoints; ascending, without repeats.
std::vector<double> region_grid(const Region& region, const Band& band, const ModeFamily& family);

/// S(x). `family` must be the family the band was assembled from.
double projector_sum(const Band& band, const ModeFamily& family, double x);

struct SumResult {
  double sup = 0.0;
  double argmax = 0.0;
  std::vector<double> points;
  std::vector<double> values;
  std::size_t term_count = 0;
  bool argmax_on_boundary = false;  ///< argmax is an endpoint of a region interval
};

SumResult sup_over_region(const Band& band, const ModeFamily& family, const Region& region,
                          Exec exec = Exec::serial);

/// |nu|^{1/6} <d |nu|^{2/3}>^{-1/4} with |nu| = sqrt(lambda^2 + n^2), <t> = sqrt(1 + t^2).
double airy_envelope(const JointEigenvalue& nu, double distance);

struct EnvelopeReport {
  std::size_t samples = 0;
  /// max |phi| / envelope on the lit side and within lambda^{-2/3+alpha} of the caustic.
  double max_ratio = 0.0;
  double argmax_x = 0.0;
  JointEigenvalue argmax_mode;
  /// Same maximum over shadow-side samples deeper than lambda^{-2/3+alpha}.
  std::size_t shadow_samples = 0;
  double max_shadow_ratio = 0.0;
  double alpha = 0.1;
};

EnvelopeReport envelope_ratio(const Band& band, const ModeFamily& family, std::span<const double> xs,
                              double alpha = 0.1, Exec exec = Exec::serial);

struct AbcReport {
  double r = 0.0;
  double eta = 0.0;
  double alpha = 0.0;
  double scale = 0.0;  ///< lambda^{-2/3+alpha}
  MuNormalization normalization = MuNormalization::per_level;
  std::size_t count_a = 0, count_b = 0, count_c = 0;
  double sigma_a = 0.0, sigma_b = 0.0, sigma_c = 0.0;
  double total = 0.0;  ///< S(r) summed in band order
};

/// Disk bands only. A: mu - r > L; C: r - mu > max(2 eta, L); B: the rest,
/// with L = lambda^{-2/3+alpha} and eta = 1 - r. Throws DomainError for r
/// outside (0, 1], UnsupportedError for other surfaces.
AbcReport abc_decomposition(const Band& band, const ModeFamily& family, double r, double alpha = 0.1,
                            MuNormalization norm = MuNormalization::per_level);

nlohmann::json to_json(const SumResult& result, bool with_values = false);
nlohmann::json to_json(const EnvelopeReport& report);
nlohmann::json to_json(const AbcReport& report);

/// {lambda, delta, surface, region, sup, argmax, counts, ...}; the optional
/// parts are omitted when null.
nlohmann::json norms_report(const Band& band, const Region& region, const SumResult& sup,
                            const EnvelopeReport* envelope = nullptr, const AbcReport* abc = nullptr);

}  // namespace caustica
