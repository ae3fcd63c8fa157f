#pragma once

// Lambda sweeps: one row of band and sup-norm diagnostics per level, computed
// concurrently and merged in lambda order, plus log-log exponent fits.

#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "caustica/cutoff.hpp"
#include "caustica/norms.hpp"
#include "caustica/revolution.hpp"
#include "json.hpp"

namespace caustica {

class ResultCache;

struct SweepConfig {
  /// "disk", or a profile spec accepted by RevolutionProfile::from_spec.
  std::string surface = "disk";
  /// Region intervals: radii on the disk, arclength on a surface of revolution.
  std::vector<std::pair<double, double>> region{{0.3, 0.7}};
  /// Distance kept from poles and equator (revolution only).
  double region_margin = 0.1;
  /// delta = delta_scale * lambda^{delta_power}.
  double delta_scale = 1.0;
  double delta_power = -1.0 / 3.0;
  Cutoff cutoff;
  /// Gap check on |n| <= (mu_max - cone_eps) lambda; revolution bands stop there too.
  double cone_eps = 0.05;
  /// Split parameter of the boundary decomposition and shadow depth.
  double alpha = 0.1;
  /// Cone n >= zero_cone * lambda for the boundary decomposition.
  double zero_cone = 0.3;
  /// Interior caustic-spacing window in mu.
  std::pair<double, double> spacing_window{0.3, 0.9};
  /// Radial cells for revolution surfaces; 0 picks the smallest even count
  /// with (lambda + 2 delta) h <= radial_lambda_h.
  int radial_cells = 0;
  double radial_lambda_h = 0.08;
  int workers = 1;
  double max_failure_fraction = 0.2;
  ResultCache* cache = nullptr;

  double delta_for(double lambda) const;
  bool is_disk() const { return surface == "disk"; }
  /// Throws ConfigError naming the field.
  void validate() const;
};

struct SweepRow {
  double lambda = 0.0;
  double delta = 0.0;
  double sup = 0.0;
  double sup_sqrt = 0.0;
  double argmax = 0.0;
  bool argmax_on_boundary = false;
  std::size_t modes = 0;
  std::size_t band_count = 0;  ///< with multiplicity
  std::size_t grid_points = 0;
  /// Minimum adjacent caustic gap times lambda in the spacing window.
  double min_caustic_gap = 0.0;
  /// Boundary-window gap times lambda eps^{1/2}, eps = lambda^{-1/3} (disk only).
  double boundary_gap = 0.0;
  bool gap_ok = false;
  int min_n_separation = 0;
  double envelope_max = 0.0;
  double shadow_max = 0.0;
  /// Boundary decomposition at r = argmax (disk only; NaN otherwise).
  double sigma_a = 0.0, sigma_b = 0.0, sigma_c = 0.0;
  bool ok = false;
  std::string error;
  /// Excluded from comparisons.
  double wall_time = 0.0;
};

struct SweepTable {
  std::string surface;
  std::string region;
  std::vector<SweepRow> rows;

  std::size_t failures() const;
};

/// Tables equal in everything except wall time (bitwise for doubles).
bool same_results(const SweepTable& a, const SweepTable& b);

class SweepAborted : public std::runtime_error {
 public:
  SweepAborted(const std::string& what, SweepTable table)
      : std::runtime_error(what), table_(std::move(table)) {}
  const SweepTable& table() const noexcept { return table_; }

 private:
  SweepTable table_;
};

/// Band modes of the configured surface at (lambda, delta), using the
/// config's cache and grid rules.
std::unique_ptr<ModeFamily> band_family(const SweepConfig& config, double lambda, double delta,
                                        Exec exec = Exec::parallel);

/// The configured region (revolution regions are checked against the profile).
Region config_region(const SweepConfig& config);

/// `count` log-spaced levels from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int count);

/// Rows for strictly increasing `lambdas`; a failing row keeps its error and
/// the sweep goes on unless more than max_failure_fraction of rows fail
/// (SweepAborted).
SweepTable run_sweep(const SweepConfig& config, std::span<const double> lambdas);

/// Rows at a fixed level for each delta; exploratory, no checks asserted.
SweepTable run_delta_sweep(const SweepConfig& config, double lambda, std::span<const double> deltas);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_std_error = 0.0;
  std::size_t samples = 0;
  /// Largest slope change when one sample is dropped.
  double leverage = 0.0;
};

constexpr std::size_t kMinFitSamples = 8;

/// OLS of log y on log x; InsufficientDataError below kMinFitSamples points.
ExponentFit fit_power_law(std::span<const double> x, std::span<const double> y);
/// Fit of sqrt(sup) against lambda over the successful rows.
ExponentFit fit_exponent(const SweepTable& table);

void write_csv(const SweepTable& table, std::ostream& out);
nlohmann::json to_json(const SweepTable& table);
nlohmann::json to_json(const ExponentFit& fit);

/// Gnuplot data block and commands for a log-log plot of sqrt(sup) with the
/// fitted line and reference slopes.
std::string plot_script(const SweepTable& table, const std::optional<ExponentFit>& fit,
                        std::span<const std::pair<std::string, double>> reference_slopes);

}  // namespace caustica
