#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <vector>

#include "caustica/calibration.hpp"
#include "caustica/disk.hpp"
#include "caustica/errors.hpp"
#include "caustica/norms.hpp"
#include "caustica/revolution.hpp"

using namespace caustica;

namespace {

double default_delta(double lambda) { return std::pow(lambda, -1.0 / 3.0); }

struct DiskBand {
  DiskModes family;
  Band band;
};

DiskBand disk_band(double lambda, double n_min_fraction = 0.0) {
  const double delta = default_delta(lambda);
  DiskModes family(disk_band_spectrum(lambda, delta, Cutoff{}, n_min_fraction));
  Band band = assemble_band(family, lambda, delta, Cutoff{});
  return {std::move(family), std::move(band)};
}

std::vector<double> dyadic_levels() { return {125.137, 250.274, 500.548, 1001.096, 2002.192}; }

constexpr double kSigmaC = calibration::kSigmaC;
constexpr double kSigmaBFar = calibration::kSigmaBFar;
constexpr double kSigmaBNear = calibration::kSigmaBNear;

}  // namespace

TEST_CASE("empty band sums to zero") {
  DiskModes family({});
  const Band band = assemble_band(family, 100.0, 0.2, Cutoff{});
  CHECK(projector_sum(band, family, 0.5) == 0.0);
  const SumResult result = sup_over_region(band, family, Region::disk_annulus(0.3, 0.7));
  CHECK(result.sup == 0.0);
  CHECK(result.term_count == 0);
  CHECK_FALSE(result.points.empty());
}

TEST_CASE("Dirichlet condition at the rim") {
  const auto [family, band] = disk_band(300.0);
  const SumResult interior = sup_over_region(band, family, Region::disk_annulus(0.3, 0.7));
  CHECK(projector_sum(band, family, 1.0) <= 1e-20 * interior.sup);
}

TEST_CASE("sum grows when the window widens") {
  const double lambda = 200.0;
  const double delta = default_delta(lambda);
  DiskModes family(disk_band_spectrum(lambda, 2.0 * delta, Cutoff{}, 0.0));
  const Band narrow = assemble_band(family, lambda, delta, Cutoff{});
  const Band wide = assemble_band(family, lambda, 2.0 * delta, Cutoff{});
  CHECK(wide.entries.size() > narrow.entries.size());
  for (int i = 1; i <= 200; ++i) {
    const double r = i / 200.0;
    CHECK(projector_sum(wide, family, r) >= projector_sum(narrow, family, r));
  }
}

TEST_CASE("grid covers caustics and their offsets") {
  const auto [family, band] = disk_band(500.0);
  const Region region = Region::disk_annulus(0.3, 0.7);
  const std::vector<double> grid = region_grid(region, band, family);
  CHECK(std::is_sorted(grid.begin(), grid.end()));
  CHECK(std::adjacent_find(grid.begin(), grid.end()) == grid.end());
  CHECK(grid.front() == 0.3);
  CHECK(grid.back() == 0.7);
  const double scale = std::pow(500.0, -2.0 / 3.0);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] - grid[i - 1] <= 0.25 * scale * (1 + 1e-12));
  for (double mu : band.mus) {
    if (mu < 0.3 || mu > 0.7) continue;
    CHECK(std::binary_search(grid.begin(), grid.end(), mu));
    if (mu + 2.0 * scale <= 0.7) CHECK(std::binary_search(grid.begin(), grid.end(), mu + 2.0 * scale));
  }
}

TEST_CASE("interior maximum sits at a caustic or an endpoint") {
  const double lambda = 500.0;
  const auto [family, band] = disk_band(lambda);
  const SumResult result = sup_over_region(band, family, Region::disk_annulus(0.3, 0.7));
  REQUIRE(result.values.size() == result.points.size());
  CHECK(result.sup == *std::max_element(result.values.begin(), result.values.end()));
  double nearest = 1.0;
  for (double mu : band.mus)
    if (mu >= 0.3 && mu <= 0.7) nearest = std::min(nearest, std::fabs(result.argmax - mu));
  MESSAGE("argmax " << result.argmax << ", nearest caustic at " << nearest * std::pow(lambda, 2.0 / 3.0)
                    << " lambda^{-2/3}");
  CHECK((nearest <= 2.0 * std::pow(lambda, -2.0 / 3.0) || result.argmax_on_boundary));
  // Oracle: a blind scan at 20 points per lambda^{-2/3} does not beat the grid by more than 1%.
  double blind = 0.0;
  const double step = std::pow(lambda, -2.0 / 3.0) / 20.0;
  for (double r = 0.3; r <= 0.7; r += step) blind = std::max(blind, projector_sum(band, family, r));
  CHECK(blind <= 1.01 * result.sup);
}

TEST_CASE("sup over a subregion never exceeds the sup over the region") {
  const auto [family, band] = disk_band(400.0);
  const SumResult full = sup_over_region(band, family, Region::disk_annulus(0.3, 0.9));
  const std::size_t m = full.points.size();
  for (auto [i, j] : {std::pair{std::size_t{0}, m / 3}, {m / 4, m / 2}, {m / 2, m - 1}, {m / 5, 4 * m / 5}}) {
    const SumResult sub =
        sup_over_region(band, family, Region::disk_annulus(full.points[i], full.points[j]));
    CHECK(sub.sup <= full.sup);
    for (double x : sub.points) CHECK(std::binary_search(full.points.begin(), full.points.end(), x));
  }
}

TEST_CASE("parallel scan matches the serial one bit for bit") {
  const auto [family, band] = disk_band(700.0);
  const Region region = Region::disk_annulus(0.2, 1.0);
  const SumResult serial = sup_over_region(band, family, region, Exec::serial);
  const SumResult parallel = sup_over_region(band, family, region, Exec::parallel);
  REQUIRE(serial.values.size() == parallel.values.size());
  for (std::size_t i = 0; i < serial.values.size(); ++i)
    CHECK(std::bit_cast<std::uint64_t>(serial.values[i]) == std::bit_cast<std::uint64_t>(parallel.values[i]));
  CHECK(serial.argmax == parallel.argmax);
  const EnvelopeReport es = envelope_ratio(band, family, serial.points, 0.1, Exec::serial);
  const EnvelopeReport ep = envelope_ratio(band, family, serial.points, 0.1, Exec::parallel);
  CHECK(es.max_ratio == ep.max_ratio);
  CHECK(es.max_shadow_ratio == ep.max_shadow_ratio);
}

TEST_CASE("local Weyl law at an interior point") {
  // All modes below lambda_max = 100, unweighted: sum |phi(x)|^2 ~ lambda_max^2 / (4 pi).
  const double top = 100.0;
  const Cutoff box(1.0, 1.0 + 1e-9);
  DiskModes family(disk_band_spectrum(top / 2.0, top / 2.0, box, 0.0));
  for (double r : {0.3, 0.5, 0.7}) {
    double sum = 0.0;
    for (std::size_t i = 0; i < family.size(); ++i)
      if (family.eigenvalue(i).lambda <= top) sum += family.multiplicity(i) * family.eigenfunction_sq(i, r);
    const double ratio = sum / (top * top / (4.0 * std::numbers::pi));
    MESSAGE("r " << r << " local Weyl ratio " << ratio);
    CHECK(ratio > 0.8);
    CHECK(ratio < 1.2);
  }
}

TEST_CASE("envelope ratio does not grow with lambda") {
  std::vector<double> maxima;
  for (double lambda : dyadic_levels()) {
    const auto [family, band] = disk_band(lambda);
    const SumResult scan = sup_over_region(band, family, Region::disk_annulus(0.3, 0.7));
    const EnvelopeReport report = envelope_ratio(band, family, scan.points);
    CHECK(report.samples > 0);
    maxima.push_back(report.max_ratio);
  }
  const double lo = *std::min_element(maxima.begin(), maxima.end());
  const double hi = *std::max_element(maxima.begin(), maxima.end());
  MESSAGE("envelope ratio range [" << lo << ", " << hi << "]");
  CHECK(hi < 2.0 * maxima.front());
  CHECK(hi < 2.0 * lo);
}

TEST_CASE("shadow side decays as lambda grows") {
  // Grid effects make neighbouring octaves noisy; compare every other one.
  double first = 0.0, previous = 1.0;
  for (double lambda : {125.137, 500.548, 2002.192}) {
    CAPTURE(lambda);
    const auto [family, band] = disk_band(lambda);
    const SumResult scan = sup_over_region(band, family, Region::disk_annulus(0.3, 0.9));
    const EnvelopeReport report = envelope_ratio(band, family, scan.points);
    CHECK(report.shadow_samples > 0);
    CHECK(report.max_shadow_ratio < previous);
    if (first == 0.0) first = report.max_shadow_ratio;
    previous = report.max_shadow_ratio;
  }
  CHECK(previous < 0.5 * first);
}

// At alpha = 0.1 the shallowest shadow samples sit at Airy argument
// ~ 2^{1/3} lambda^{0.1}, about 2.7 at lambda = 2000, far from the depth of
// about 9 that a 1e-8 ratio needs.
TEST_CASE("shadow values below 1e-8 of the envelope" * doctest::should_fail()) {
  const auto [family, band] = disk_band(2002.192);
  const SumResult scan = sup_over_region(band, family, Region::disk_annulus(0.3, 0.9));
  const EnvelopeReport report = envelope_ratio(band, family, scan.points);
  MESSAGE("max shadow ratio " << report.max_shadow_ratio);
  CHECK(report.max_shadow_ratio <= 1e-8);
}

TEST_CASE("Airy derivative term stays bounded after the envelope weight") {
  double worst = 0.0;
  for (double t = -4.0; t <= 400.0; t += 0.01)
    worst = std::max(worst, std::fabs(specfun::airy_ai_prime(-t)) * std::pow(1.0 + t * t, -1.0 / 8.0));
  CHECK(worst < 1.0 / std::sqrt(std::numbers::pi) * 1.01);
  CHECK(worst > 0.5);
}

TEST_CASE("A, B and C partition the boundary sum") {
  const auto [family, band] = disk_band(1000.0, 0.3);
  for (double eta : {0.0, 0.001, 0.01, 0.03, 0.08, 0.2}) {
    CAPTURE(eta);
    const AbcReport report = abc_decomposition(band, family, 1.0 - eta);
    CHECK(report.count_a + report.count_b + report.count_c == band.entries.size());
    CHECK(report.total == projector_sum(band, family, 1.0 - eta));
    CHECK(report.sigma_a + report.sigma_b + report.sigma_c ==
          doctest::Approx(report.total).epsilon(1e-13));
    CHECK(report.sigma_a >= 0.0);
    CHECK(report.sigma_b >= 0.0);
    CHECK(report.sigma_c >= 0.0);
  }
  const AbcReport rim = abc_decomposition(band, family, 1.0);
  CHECK(rim.count_a == 0);
}

TEST_CASE("A, B and C sums obey the frozen bounds") {
  for (double lambda : {548.57, 793.76, 1148.55, 1661.93, 1999.14}) {
    CAPTURE(lambda);
    const auto [family, band] = disk_band(lambda, 0.3);
    const double scale = std::pow(lambda, -2.0 / 3.0 + 0.1);
    for (int i = 0; i <= 200; ++i) {
      const double eta = 0.1 * i / 200.0;
      const AbcReport report = abc_decomposition(band, family, 1.0 - eta);
      CHECK(report.sigma_c / std::pow(lambda, 8.0 / 9.0) <= 2.0 * kSigmaC);
      if (eta >= scale)
        CHECK(report.sigma_b / std::pow(lambda, 8.0 / 9.0) <= 2.0 * kSigmaBFar);
      else
        CHECK(report.sigma_b / std::pow(lambda, 2.0 / 3.0 + 0.1) <= 2.0 * kSigmaBNear);
    }
  }
}

TEST_CASE("decomposition rejects bad input") {
  const auto [family, band] = disk_band(200.0);
  CHECK_THROWS_AS(abc_decomposition(band, family, 0.0), DomainError);
  CHECK_THROWS_AS(abc_decomposition(band, family, 1.01), DomainError);
  CHECK_THROWS_AS(abc_decomposition(band, family, 0.9, 0.0), DomainError);
  const Band other = make_band(200.0, 0.2, "revolution:round", {});
  CHECK_THROWS_AS(abc_decomposition(other, family, 0.9), UnsupportedError);
}

TEST_CASE("regions validate their intervals") {
  CHECK_THROWS_AS(Region::disk_annulus(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(Region::disk_annulus(0.5, 0.4), DomainError);
  CHECK_THROWS_AS(Region::disk_annulus(0.5, 1.1), DomainError);
  const RevolutionProfile profile = RevolutionProfile::perturbed(0.1);
  const double s = profile.s_max();
  CHECK_NOTHROW(Region::revolution(profile, {{0.4, s - 0.2}, {s + 0.2, profile.L() - 0.4}}, 0.1));
  CHECK_THROWS_AS(Region::revolution(profile, {{0.05, 0.5}}, 0.1), DomainError);
  CHECK_THROWS_AS(Region::revolution(profile, {{0.5, s}}, 0.1), DomainError);
  CHECK_THROWS_AS(Region::revolution(profile, {{0.5, 1.0}, {0.9, 1.2}}, 0.1), DomainError);
  const Region r = Region::revolution(profile, {{0.5, 0.8}}, 0.1);
  CHECK(r.contains(0.6));
  CHECK_FALSE(r.contains(0.9));
}

TEST_CASE("revolution sup scan stays off the poles") {
  const RevolutionProfile profile = RevolutionProfile::perturbed(0.1);
  const double lambda = 60.37, delta = default_delta(lambda);
  RevolutionModes family(profile, rev_band_spectrum(profile, lambda, delta, Cutoff{}, 0.05));
  const Band band = assemble_band(family, lambda, delta, Cutoff{});
  const Region region = Region::revolution(profile, {{0.5, profile.s_max() - 0.3}}, 0.2);
  const SumResult result = sup_over_region(band, family, region);
  CHECK(result.sup > 0.0);
  CHECK(region.contains(result.argmax));
  const EnvelopeReport env = envelope_ratio(band, family, result.points);
  CHECK(env.max_ratio > 0.1);
  CHECK(env.max_ratio < 5.0);
}

TEST_CASE("json report carries the run summary") {
  const auto [family, band] = disk_band(300.0, 0.3);
  const Region region = Region::disk_annulus(0.9, 1.0);
  const SumResult result = sup_over_region(band, family, region);
  const EnvelopeReport env = envelope_ratio(band, family, result.points);
  const AbcReport abc = abc_decomposition(band, family, result.argmax);
  const nlohmann::json j = norms_report(band, region, result, &env, &abc);
  CHECK(j.at("lambda").get<double>() == 300.0);
  CHECK(j.at("sup").get<double>() == result.sup);
  CHECK(j.at("counts").at("cardinality").get<std::size_t>() == band.cardinality());
  CHECK(j.at("abc").at("partial_sums").contains("C"));
  CHECK(j.at("envelope").contains("max_shadow_ratio"));
  CHECK(j.at("region").get<std::string>() == region.describe());
  CHECK_FALSE(norms_report(band, region, result).contains("abc"));
}
