#include "caustica/bands.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "caustica/errors.hpp"
#include "caustica/specfun.hpp"

namespace caustica {

std::string to_string(MuNormalization m) { return m == MuNormalization::per_mode ? "per-mode" : "per-level"; }

std::size_t Band::cardinality() const {
  std::size_t total = 0;
  for (const auto& e : entries) total += static_cast<std::size_t>(e.multiplicity);
  return total;
}

std::vector<double> Band::caustic_parameters(MuNormalization norm) const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries)
    out.push_back(norm == MuNormalization::per_mode ? e.nu.mu : std::abs(e.nu.n) / lambda);
  std::sort(out.begin(), out.end());
  return out;
}

Band make_band(double lambda, double delta, std::string surface_id, std::vector<BandEntry> entries) {
  Band band;
  band.lambda = lambda;
  band.delta = delta;
  band.surface_id = std::move(surface_id);
  band.entries = std::move(entries);
  std::map<double, int> counts;
  for (const auto& e : band.entries) counts[e.nu.mu] += e.multiplicity;
  for (const auto& [mu, c] : counts) {
    band.mus.push_back(mu);
    band.mu_counts.push_back(c);
  }
  return band;
}

Band assemble_band(const ModeFamily& source, double lambda, double delta, const Cutoff& cutoff) {
  if (!(lambda > 0.0) || !(delta > 0.0)) throw DomainError("assemble_band: lambda and delta must be positive");
  std::vector<BandEntry> entries;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const JointEigenvalue& nu = source.eigenvalue(i);
    const double phi = cutoff((nu.lambda - lambda) / delta);
    const double weight = phi * phi;
    if (!(weight > 0.0)) continue;
    entries.push_back({nu, weight, source.multiplicity(i), i});
  }
  return make_band(lambda, delta, source.surface_id(), std::move(entries));
}

GapReport check_gap(const Band& band, double cone) {
  GapReport report;
  std::vector<int> ns;
  for (const auto& e : band.entries)
    if (std::abs(e.nu.n) <= cone * band.lambda) ns.push_back(std::abs(e.nu.n));
  std::sort(ns.begin(), ns.end());
  report.checked = ns.size();
  for (std::size_t i = 1; i < ns.size(); ++i) {
    const int gap = ns[i] - ns[i - 1];
    report.min_separation = std::min(report.min_separation, gap);
    if (gap == 0 && (report.repeated_n.empty() || report.repeated_n.back() != ns[i])) {
      report.injective = false;
      report.repeated_n.push_back(ns[i]);
    }
  }
  return report;
}

namespace {

SpacingReport spacing(const Band& band, double lo, double hi, double scale, MuNormalization norm) {
  SpacingReport report;
  report.mu_lo = lo;
  report.mu_hi = hi;
  report.scale = scale;
  report.normalization = norm;
  std::vector<double> mus;
  for (double mu : band.caustic_parameters(norm))
    if (mu >= lo && mu <= hi && (mus.empty() || mu != mus.back())) mus.push_back(mu);
  report.count = mus.size();
  if (mus.size() < 2) {
    report.trivial = true;
    return report;
  }
  for (std::size_t i = 1; i < mus.size(); ++i) report.min_gap = std::min(report.min_gap, mus[i] - mus[i - 1]);
  report.normalized = report.min_gap / scale;
  return report;
}

}  // namespace

SpacingReport check_caustic_spacing(const Band& band, double mu_lo, double mu_hi, MuNormalization norm) {
  if (!(mu_lo < mu_hi)) throw DomainError("check_caustic_spacing: empty region");
  return spacing(band, mu_lo, mu_hi, 1.0 / band.lambda, norm);
}

SpacingReport check_boundary_spacing(const Band& band, double eps, MuNormalization norm) {
  if (!(eps > 0.0 && eps < 0.5)) throw DomainError("check_boundary_spacing: eps outside (0, 1/2)");
  return spacing(band, 1.0 - 2.0 * eps, 1.0 - 0.5 * eps, 1.0 / (band.lambda * std::sqrt(eps)), norm);
}

ZeroAsymptoticsReport check_zero_asymptotics(const Band& band, double cone, double olver_constant) {
  if (band.surface_id != "disk")
    throw UnsupportedError("check_zero_asymptotics: Bessel-zero asymptotics apply to disk bands only");
  ZeroAsymptoticsReport report;
  struct Point {
    int n;
    double a;
  };
  std::vector<Point> points;
  for (const auto& e : band.entries) {
    const int n = std::abs(e.nu.n);
    if (n < 1 || n < cone * band.lambda) continue;
    const double a = specfun::airy_zero(static_cast<std::size_t>(e.nu.k));
    const double t = a / std::cbrt(static_cast<double>(n) * n);
    const double residual = std::fabs(e.nu.lambda - n - n * specfun::olver_F(t));
    report.max_residual = std::max(report.max_residual, residual);
    report.max_residual_times_n = std::max(report.max_residual_times_n, residual * n);
    report.max_argument = std::max(report.max_argument, t);
    report.n_min = report.checked == 0 ? n : std::min(report.n_min, n);
    ++report.checked;
    points.push_back({n, a});
  }
  if (report.checked > 0) {
    report.bound = olver_constant / report.n_min;
    report.residual_ok = report.max_residual <= report.bound;
  }
  std::sort(points.begin(), points.end(), [](const Point& x, const Point& y) { return x.n < y.n; });
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[j].n == points[i].n) continue;
      if (points[j].a == points[i].a) report.distinct_airy_indices = false;
      const double ratio = std::cbrt(static_cast<double>(points[i].n)) * std::fabs(points[i].a - points[j].a) /
                           (points[j].n - points[i].n);
      report.max_pair_ratio = std::max(report.max_pair_ratio, ratio);
    }
  }
  return report;
}

void write_band_csv(const Band& band, std::ostream& out) {
  const auto old = out.precision(17);
  out << "lambda_nu,n,k,mu,weight,multiplicity\n";
  for (const auto& e : band.entries)
    out << e.nu.lambda << ',' << e.nu.n << ',' << e.nu.k << ',' << e.nu.mu << ',' << e.weight << ','
        << e.multiplicity << '\n';
  out.precision(old);
}

}  // namespace caustica
