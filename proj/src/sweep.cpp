#include "caustica/sweep.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <tuple>

#include "caustica/bands.hpp"
#include "caustica/disk.hpp"
#include "caustica/errors.hpp"
#include "caustica/norms.hpp"

namespace caustica {

double SweepConfig::delta_for(double lambda) const { return delta_scale * std::pow(lambda, delta_power); }

void SweepConfig::validate() const {
  if (surface.empty()) throw ConfigError("surface", "must not be empty");
  if (region.empty()) throw ConfigError("region", "at least one interval required");
  for (const auto& [lo, hi] : region)
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) throw ConfigError("region", "intervals need lo < hi");
  if (is_disk()) {
    for (const auto& [lo, hi] : region)
      if (!(lo > 0.0 && hi <= 1.0)) throw ConfigError("region", "disk radii must lie in (0, 1]");
  }
  if (!(region_margin > 0.0)) throw ConfigError("region_margin", "must be positive");
  if (!(delta_scale > 0.0) || !std::isfinite(delta_scale)) throw ConfigError("delta_scale", "must be positive");
  if (!std::isfinite(delta_power) || delta_power > 0.0) throw ConfigError("delta_power", "must be <= 0");
  if (!(cutoff.plateau() > 0.0 && cutoff.plateau() < cutoff.support()))
    throw ConfigError("cutoff", "need 0 < plateau < support");
  if (!(cone_eps > 0.0 && cone_eps < 1.0)) throw ConfigError("cone_eps", "must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 2.0 / 3.0)) throw ConfigError("alpha", "must lie in (0, 2/3)");
  if (!(zero_cone >= 0.0 && zero_cone < 1.0)) throw ConfigError("zero_cone", "must lie in [0, 1)");
  if (!(spacing_window.first < spacing_window.second && spacing_window.first >= 0.0))
    throw ConfigError("spacing_window", "need 0 <= lo < hi");
  if (radial_cells < 0 || (radial_cells > 0 && (radial_cells < 16 || radial_cells % 2 != 0)))
    throw ConfigError("radial_cells", "0 (automatic) or an even count >= 16");
  if (!(radial_lambda_h > 0.0 && radial_lambda_h <= 0.1)) throw ConfigError("radial_lambda_h", "must lie in (0, 0.1]");
  if (workers < 1) throw ConfigError("workers", "must be >= 1");
  if (!(max_failure_fraction >= 0.0 && max_failure_fraction <= 1.0))
    throw ConfigError("max_failure_fraction", "must lie in [0, 1]");
}

std::size_t SweepTable::failures() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.ok; }));
}

namespace {

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Surface {
  std::optional<RevolutionProfile> profile;
  Region region;
};

Surface make_surface(const SweepConfig& config) {
  if (config.is_disk()) {
    if (config.region.size() != 1) throw ConfigError("region", "the disk takes a single annulus");
    return {std::nullopt, Region::disk_annulus(config.region[0].first, config.region[0].second)};
  }
  RevolutionProfile profile = [&] {
    try {
      return RevolutionProfile::from_spec(config.surface);
    } catch (const std::exception& e) {
      throw ConfigError("surface", e.what());
    }
  }();
  const ProfileReport report = validate_profile(profile);
  if (!report.ok) throw ConfigError("surface", "profile rejected: " + report.failures.front());
  Region region = [&] {
    try {
      return Region::revolution(profile, config.region, config.region_margin);
    } catch (const DomainError& e) {
      throw ConfigError("region", e.what());
    }
  }();
  return {std::move(profile), std::move(region)};
}

int radial_cells_for(const SweepConfig& config, const RevolutionProfile& profile, double lambda, double delta) {
  if (config.radial_cells > 0) return config.radial_cells;
  const double top = lambda + config.cutoff.support() * delta;
  auto cells = static_cast<int>(std::ceil(profile.L() * top / config.radial_lambda_h));
  cells += cells % 2;
  return std::max(cells, 16);
}

std::unique_ptr<ModeFamily> make_family(const SweepConfig& config, const Surface& surface, double lambda,
                                        double delta, Exec exec) {
  if (!surface.profile)
    return std::make_unique<DiskModes>(disk_band_spectrum(lambda, delta, config.cutoff, 0.0, config.cache, exec));
  RevBandOptions options;
  options.radial.grid_points = radial_cells_for(config, *surface.profile, lambda, delta);
  options.cache = config.cache;
  options.exec = exec;
  return std::make_unique<RevolutionModes>(
      *surface.profile, rev_band_spectrum(*surface.profile, lambda, delta, config.cutoff, config.cone_eps, options));
}

void fill_row(const SweepConfig& config, const Surface& surface, SweepRow& row, Exec exec) {
  const double lambda = row.lambda;
  const double delta = row.delta;
  const std::unique_ptr<ModeFamily> family = make_family(config, surface, lambda, delta, exec);
  const Band band = assemble_band(*family, lambda, delta, config.cutoff);
  row.modes = band.entries.size();
  row.band_count = band.cardinality();

  const GapReport gap = check_gap(band, family->mu_max() - config.cone_eps);
  row.gap_ok = gap.injective;
  row.min_n_separation = gap.min_separation;
  const SpacingReport spacing =
      check_caustic_spacing(band, config.spacing_window.first, config.spacing_window.second);
  row.min_caustic_gap = spacing.normalized;
  row.boundary_gap = surface.profile ? kNaN : check_boundary_spacing(band, std::pow(lambda, -1.0 / 3.0)).normalized;

  const SumResult sup = sup_over_region(band, *family, surface.region, exec);
  row.sup = sup.sup;
  row.sup_sqrt = std::sqrt(sup.sup);
  row.argmax = sup.argmax;
  row.argmax_on_boundary = sup.argmax_on_boundary;
  row.grid_points = sup.points.size();
  const EnvelopeReport env = envelope_ratio(band, *family, sup.points, config.alpha, exec);
  row.envelope_max = env.max_ratio;
  row.shadow_max = env.max_shadow_ratio;

  if (surface.profile) {
    row.sigma_a = row.sigma_b = row.sigma_c = kNaN;
  } else {
    std::vector<BandEntry> cone;
    for (const auto& e : band.entries)
      if (std::abs(e.nu.n) >= config.zero_cone * lambda) cone.push_back(e);
    const AbcReport abc = abc_decomposition(make_band(lambda, delta, band.surface_id, std::move(cone)), *family,
                                            sup.argmax, config.alpha);
    row.sigma_a = abc.sigma_a;
    row.sigma_b = abc.sigma_b;
    row.sigma_c = abc.sigma_c;
  }
  row.ok = true;
}

SweepTable run_rows(const SweepConfig& config, std::vector<SweepRow> rows) {
  config.validate();
  const Surface surface = make_surface(config);
  SweepTable table;
  table.surface = config.surface;
  table.region = surface.region.describe();
  const long long count = static_cast<long long>(rows.size());
  const Exec inner = config.workers > 1 ? Exec::serial : Exec::parallel;
#pragma omp parallel for schedule(dynamic, 1) num_threads(config.workers) if (config.workers > 1)
  for (long long i = 0; i < count; ++i) {
    SweepRow& row = rows[static_cast<std::size_t>(i)];
    const auto start = std::chrono::steady_clock::now();
    try {
      fill_row(config, surface, row, inner);
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  table.rows = std::move(rows);
  const std::size_t failed = table.failures();
  if (!table.rows.empty() && failed > config.max_failure_fraction * table.rows.size()) {
    std::ostringstream msg;
    msg << "sweep aborted: " << failed << " of " << table.rows.size() << " rows failed";
    throw SweepAborted(msg.str(), std::move(table));
  }
  return table;
}

}  // namespace

std::unique_ptr<ModeFamily> band_family(const SweepConfig& config, double lambda, double delta, Exec exec) {
  config.validate();
  return make_family(config, make_surface(config), lambda, delta, exec);
}

Region config_region(const SweepConfig& config) { return make_surface(config).region; }

std::vector<double> log_grid(double lo, double hi, int count) {
  if (count < 0) throw DomainError("log_grid: negative count");
  if (count == 0) return {};
  if (!(lo > 0.0 && hi >= lo)) throw DomainError("log_grid: need 0 < lo <= hi");
  if (count == 1) return {lo};
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(i == count - 1 ? hi : lo * std::pow(hi / lo, i / (count - 1.0)));
  return out;
}

SweepTable run_sweep(const SweepConfig& config, std::span<const double> lambdas) {
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0) || !std::isfinite(lambdas[i])) throw ConfigError("lambda", "levels must be positive");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw ConfigError("lambda", "levels must increase strictly");
    SweepRow row;
    row.lambda = lambdas[i];
    row.delta = config.delta_for(lambdas[i]);
    rows.push_back(row);
  }
  return run_rows(config, std::move(rows));
}

SweepTable run_delta_sweep(const SweepConfig& config, double lambda, std::span<const double> deltas) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda", "level must be positive");
  std::vector<SweepRow> rows;
  for (double delta : deltas) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("delta", "widths must be positive");
    SweepRow row;
    row.lambda = lambda;
    row.delta = delta;
    rows.push_back(row);
  }
  return run_rows(config, std::move(rows));
}

bool same_results(const SweepTable& a, const SweepTable& b) {
  if (a.surface != b.surface || a.region != b.region || a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const SweepRow& x = a.rows[i];
    const SweepRow& y = b.rows[i];
    const bool doubles = same_bits(x.lambda, y.lambda) && same_bits(x.delta, y.delta) && same_bits(x.sup, y.sup) &&
                         same_bits(x.sup_sqrt, y.sup_sqrt) && same_bits(x.argmax, y.argmax) &&
                         same_bits(x.min_caustic_gap, y.min_caustic_gap) && same_bits(x.boundary_gap, y.boundary_gap) &&
                         same_bits(x.envelope_max, y.envelope_max) && same_bits(x.shadow_max, y.shadow_max) &&
                         same_bits(x.sigma_a, y.sigma_a) && same_bits(x.sigma_b, y.sigma_b) &&
                         same_bits(x.sigma_c, y.sigma_c);
    const bool rest = x.argmax_on_boundary == y.argmax_on_boundary && x.modes == y.modes &&
                      x.band_count == y.band_count && x.grid_points == y.grid_points && x.gap_ok == y.gap_ok &&
                      x.min_n_separation == y.min_n_separation && x.ok == y.ok && x.error == y.error;
    if (!doubles || !rest) return false;
  }
  return true;
}

ExponentFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("fit_power_law: size mismatch");
  if (x.size() < kMinFitSamples)
    throw InsufficientDataError("fit_power_law: " + std::to_string(x.size()) + " samples, need " +
                                std::to_string(kMinFitSamples));
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw DomainError("fit_power_law: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const auto ols = [&](std::size_t skip) {
    double mx = 0.0, my = 0.0, m = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      if (i == skip) continue;
      mx += lx[i];
      my += ly[i];
      m += 1.0;
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      if (i == skip) continue;
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw DomainError("fit_power_law: all abscissae equal");
    const double slope = sxy / sxx;
    return std::pair{slope, my - slope * mx};
  };
  ExponentFit fit;
  fit.samples = lx.size();
  std::tie(fit.slope, fit.intercept) = ols(lx.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.residual_std_error = std::sqrt(ss / (lx.size() - 2.0));
  for (std::size_t i = 0; i < lx.size(); ++i) fit.leverage = std::max(fit.leverage, std::fabs(ols(i).first - fit.slope));
  return fit;
}

ExponentFit fit_exponent(const SweepTable& table) {
  std::vector<double> x, y;
  for (const auto& row : table.rows) {
    if (!row.ok) continue;
    x.push_back(row.lambda);
    y.push_back(row.sup_sqrt);
  }
  return fit_power_law(x, y);
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

void write_csv(const SweepTable& table, std::ostream& out) {
  const auto old = out.precision(17);
  out << "lambda,delta,sup,sup_sqrt,argmax,argmax_on_boundary,modes,band_count,grid_points,min_caustic_gap,"
         "boundary_gap,gap_ok,min_n_separation,envelope_max,shadow_max,sigma_a,sigma_b,sigma_c,ok,error,wall_time\n";
  for (const auto& r : table.rows) {
    out << r.lambda << ',' << r.delta << ',' << r.sup << ',' << r.sup_sqrt << ',' << r.argmax << ','
        << r.argmax_on_boundary << ',' << r.modes << ',' << r.band_count << ',' << r.grid_points << ','
        << r.min_caustic_gap << ',' << r.boundary_gap << ',' << r.gap_ok << ',' << r.min_n_separation << ','
        << r.envelope_max << ',' << r.shadow_max << ',' << r.sigma_a << ',' << r.sigma_b << ',' << r.sigma_c << ','
        << r.ok << ',' << csv_quote(r.error) << ',' << r.wall_time << '\n';
  }
  out.precision(old);
}

nlohmann::json to_json(const SweepTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"lambda", r.lambda},
                    {"delta", r.delta},
                    {"sup", number(r.sup)},
                    {"sup_sqrt", number(r.sup_sqrt)},
                    {"argmax", number(r.argmax)},
                    {"argmax_on_boundary", r.argmax_on_boundary},
                    {"modes", r.modes},
                    {"band_count", r.band_count},
                    {"grid_points", r.grid_points},
                    {"min_caustic_gap", number(r.min_caustic_gap)},
                    {"boundary_gap", number(r.boundary_gap)},
                    {"gap_ok", r.gap_ok},
                    {"min_n_separation", r.min_n_separation},
                    {"envelope_max", number(r.envelope_max)},
                    {"shadow_max", number(r.shadow_max)},
                    {"sigma_a", number(r.sigma_a)},
                    {"sigma_b", number(r.sigma_b)},
                    {"sigma_c", number(r.sigma_c)},
                    {"ok", r.ok},
                    {"error", r.error},
                    {"wall_time", r.wall_time}});
  }
  return {{"surface", table.surface}, {"region", table.region}, {"failures", table.failures()}, {"rows", rows}};
}

nlohmann::json to_json(const ExponentFit& fit) {
  return {{"slope", fit.slope},
          {"intercept", fit.intercept},
          {"residual_std_error", fit.residual_std_error},
          {"samples", fit.samples},
          {"leverage", fit.leverage}};
}

std::string plot_script(const SweepTable& table, const std::optional<ExponentFit>& fit,
                        std::span<const std::pair<std::string, double>> reference_slopes) {
  std::ostringstream out;
  out.precision(17);
  out << "# " << table.surface << ", region " << table.region << "\n";
  out << "$sweep << EOD\n";
  double x0 = 0.0, y0 = 0.0;
  for (const auto& r : table.rows) {
    if (!r.ok) continue;
    if (x0 == 0.0) {
      x0 = r.lambda;
      y0 = r.sup_sqrt;
    }
    out << r.lambda << ' ' << r.sup_sqrt << '\n';
  }
  out << "EOD\n";
  out << "set logscale xy\nset xlabel 'lambda'\nset ylabel 'sqrt(sup S)'\nset key left top\n";
  out << "plot $sweep using 1:2 with linespoints title 'measured'";
  if (fit)
    out << ", exp(" << fit->intercept << ")*x**" << fit->slope << " title sprintf('fit %.4f', " << fit->slope << ")";
  for (const auto& [name, slope] : reference_slopes)
    if (x0 > 0.0) out << ", " << y0 << "*(x/" << x0 << ")**" << slope << " dashtype 2 title '" << name << "'";
  out << "\n";
  return out.str();
}

}  // namespace caustica
