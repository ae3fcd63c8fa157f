#include "caustica/norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "caustica/errors.hpp"
#include "caustica/parallel.hpp"

namespace caustica {

Region Region::disk_annulus(double r_lo, double r_hi) {
  if (!(r_lo > 0.0 && r_lo < r_hi && r_hi <= 1.0))
    throw DomainError("Region::disk_annulus: need 0 < r_lo < r_hi <= 1");
  Region region;
  region.kind_ = Kind::disk_annulus;
  region.intervals_ = {{r_lo, r_hi}};
  return region;
}

Region Region::revolution(const RevolutionProfile& profile, std::vector<std::pair<double, double>> intervals,
                          double margin) {
  if (intervals.empty()) throw DomainError("Region::revolution: no intervals");
  if (!(margin > 0.0)) throw DomainError("Region::revolution: margin must be positive");
  std::sort(intervals.begin(), intervals.end());
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto [lo, hi] = intervals[i];
    if (!(lo < hi)) throw DomainError("Region::revolution: empty interval");
    if (lo < margin || hi > profile.L() - margin) throw DomainError("Region::revolution: interval reaches a pole");
    if (hi > profile.s_max() - margin && lo < profile.s_max() + margin)
      throw DomainError("Region::revolution: interval reaches the equator");
    if (i > 0 && lo <= intervals[i - 1].second) throw DomainError("Region::revolution: overlapping intervals");
  }
  Region region;
  region.kind_ = Kind::revolution_intervals;
  region.intervals_ = std::move(intervals);
  return region;
}

bool Region::contains(double x) const {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [x](const auto& iv) { return x >= iv.first && x <= iv.second; });
}

std::string Region::describe() const {
  std::ostringstream out;
  out.precision(17);
  out << (kind_ == Kind::disk_annulus ? "disk" : "revolution");
  for (const auto& [lo, hi] : intervals_) out << " [" << lo << ", " << hi << "]";
  return out.str();
}

std::vector<double> region_grid(const Region& region, const Band& band, const ModeFamily& family) {
  const double scale = std::pow(band.lambda, -2.0 / 3.0);
  const double step = 0.25 * scale;
  std::vector<double> pts;
  // Lattice points i * step, so that the grid of a subregion bounded by grid
  // points is a subset of the full grid.
  for (const auto& [lo, hi] : region.intervals()) {
    pts.push_back(lo);
    pts.push_back(hi);
    for (auto i = static_cast<long>(std::ceil(lo / step)); i * step <= hi; ++i)
      if (i * step >= lo) pts.push_back(i * step);
  }
  for (double mu : band.mus) {
    if (!(mu > 0.0 && mu < family.mu_max())) continue;
    for (double c : family.caustic_points(mu)) {
      for (double off : {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0}) {
        const double x = c + off * scale;
        if (region.contains(x)) pts.push_back(x);
      }
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

namespace {

void check_family(const Band& band, const ModeFamily& family) {
  if (band.surface_id != family.surface_id()) throw DomainError("norms: band and mode family differ in surface");
  for (const auto& e : band.entries)
    if (e.source_index >= family.size()) throw DomainError("norms: band entry outside the mode family");
}

double term(const BandEntry& e, const ModeFamily& family, double x) {
  return e.weight * e.multiplicity * family.eigenfunction_sq(e.source_index, x);
}

}  // namespace

double projector_sum(const Band& band, const ModeFamily& family, double x) {
  check_family(band, family);
  double sum = 0.0;
  for (const auto& e : band.entries) sum += term(e, family, x);
  return sum;
}

SumResult sup_over_region(const Band& band, const ModeFamily& family, const Region& region, Exec exec) {
  check_family(band, family);
  SumResult result;
  result.points = region_grid(region, band, family);
  result.values.assign(result.points.size(), 0.0);
  result.term_count = band.entries.size();
  for_each_index(result.points.size(), exec, [&](std::size_t i) {
    double sum = 0.0;
    for (const auto& e : band.entries) sum += term(e, family, result.points[i]);
    result.values[i] = sum;
  });
  if (result.points.empty()) return result;
  const auto it = std::max_element(result.values.begin(), result.values.end());
  const std::size_t i = static_cast<std::size_t>(it - result.values.begin());
  result.sup = *it;
  result.argmax = result.points[i];
  for (const auto& [lo, hi] : region.intervals())
    if (result.argmax == lo || result.argmax == hi) result.argmax_on_boundary = true;
  return result;
}

double airy_envelope(const JointEigenvalue& nu, double distance) {
  const double size = std::hypot(nu.lambda, static_cast<double>(nu.n));
  const double t = distance * std::pow(size, 2.0 / 3.0);
  return std::pow(size, 1.0 / 6.0) * std::pow(1.0 + t * t, -1.0 / 8.0);
}

EnvelopeReport envelope_ratio(const Band& band, const ModeFamily& family, std::span<const double> xs, double alpha,
                              Exec exec) {
  check_family(band, family);
  EnvelopeReport report;
  report.alpha = alpha;
  const double depth = std::pow(band.lambda, -2.0 / 3.0 + alpha);
  struct Local {
    double lit = 0.0, shadow = 0.0;
    std::size_t lit_entry = 0, shadow_samples = 0, samples = 0;
  };
  std::vector<Local> per_point(xs.size());
  for_each_index(xs.size(), exec, [&](std::size_t p) {
    Local& loc = per_point[p];
    for (std::size_t j = 0; j < band.entries.size(); ++j) {
      const BandEntry& e = band.entries[j];
      const double d = family.caustic_distance(e.nu.mu, xs[p]);
      const double ratio = std::sqrt(family.eigenfunction_sq(e.source_index, xs[p])) / airy_envelope(e.nu, d);
      if (family.forbidden(e.nu.mu, xs[p]) && d > depth) {
        ++loc.shadow_samples;
        loc.shadow = std::max(loc.shadow, ratio);
      } else {
        ++loc.samples;
        if (ratio > loc.lit) {
          loc.lit = ratio;
          loc.lit_entry = j;
        }
      }
    }
  });
  for (std::size_t p = 0; p < xs.size(); ++p) {
    const Local& loc = per_point[p];
    report.samples += loc.samples;
    report.shadow_samples += loc.shadow_samples;
    report.max_shadow_ratio = std::max(report.max_shadow_ratio, loc.shadow);
    if (loc.lit > report.max_ratio) {
      report.max_ratio = loc.lit;
      report.argmax_x = xs[p];
      report.argmax_mode = band.entries[loc.lit_entry].nu;
    }
  }
  return report;
}

AbcReport abc_decomposition(const Band& band, const ModeFamily& family, double r, double alpha,
                            MuNormalization norm) {
  if (band.surface_id != "disk") throw UnsupportedError("abc_decomposition: disk bands only");
  if (!(r > 0.0 && r <= 1.0)) throw DomainError("abc_decomposition: r outside (0, 1]");
  if (!(alpha > 0.0 && alpha < 2.0 / 3.0)) throw DomainError("abc_decomposition: alpha outside (0, 2/3)");
  check_family(band, family);
  AbcReport report;
  report.r = r;
  report.eta = 1.0 - r;
  report.alpha = alpha;
  report.normalization = norm;
  report.scale = std::pow(band.lambda, -2.0 / 3.0 + alpha);
  const double far = std::max(2.0 * report.eta, report.scale);
  for (const auto& e : band.entries) {
    const double mu = norm == MuNormalization::per_mode ? e.nu.mu : std::abs(e.nu.n) / band.lambda;
    const double value = term(e, family, r);
    report.total += value;
    if (mu - r > report.scale) {
      ++report.count_a;
      report.sigma_a += value;
    } else if (r - mu > far) {
      ++report.count_c;
      report.sigma_c += value;
    } else {
      ++report.count_b;
      report.sigma_b += value;
    }
  }
  return report;
}

nlohmann::json to_json(const SumResult& result, bool with_values) {
  nlohmann::json j{{"sup", result.sup},
                   {"sqrt_sup", std::sqrt(result.sup)},
                   {"argmax", result.argmax},
                   {"grid_points", result.points.size()},
                   {"term_count", result.term_count},
                   {"argmax_on_boundary", result.argmax_on_boundary}};
  if (with_values) {
    j["points"] = result.points;
    j["values"] = result.values;
  }
  return j;
}

nlohmann::json to_json(const EnvelopeReport& report) {
  return {{"samples", report.samples},
          {"max_ratio", report.max_ratio},
          {"argmax_x", report.argmax_x},
          {"argmax_mode", {{"lambda", report.argmax_mode.lambda}, {"n", report.argmax_mode.n}, {"k", report.argmax_mode.k}}},
          {"shadow_samples", report.shadow_samples},
          {"max_shadow_ratio", report.max_shadow_ratio},
          {"alpha", report.alpha}};
}

nlohmann::json to_json(const AbcReport& report) {
  return {{"r", report.r},
          {"eta", report.eta},
          {"alpha", report.alpha},
          {"scale", report.scale},
          {"mu_normalization", to_string(report.normalization)},
          {"counts", {{"A", report.count_a}, {"B", report.count_b}, {"C", report.count_c}}},
          {"partial_sums", {{"A", report.sigma_a}, {"B", report.sigma_b}, {"C", report.sigma_c}}},
          {"total", report.total}};
}

nlohmann::json norms_report(const Band& band, const Region& region, const SumResult& sup,
                            const EnvelopeReport* envelope, const AbcReport* abc) {
  nlohmann::json j{{"lambda", band.lambda},
                   {"delta", band.delta},
                   {"surface", band.surface_id},
                   {"region", region.describe()},
                   {"sup", sup.sup},
                   {"argmax", sup.argmax},
                   {"argmax_on_boundary", sup.argmax_on_boundary},
                   {"counts", {{"modes", band.entries.size()}, {"cardinality", band.cardinality()},
                               {"grid_points", sup.points.size()}}}};
  if (envelope) j["envelope"] = to_json(*envelope);
  if (abc) j["abc"] = to_json(*abc);
  return j;
}

}  // namespace caustica
