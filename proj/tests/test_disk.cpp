#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <array>
#include <bit>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>

#include "caustica/cache.hpp"
#include "caustica/disk.hpp"
#include "caustica/errors.hpp"

using namespace caustica;
namespace sf = caustica::specfun;

namespace {

// Oracle: 2 pi c^2 int_0^1 J_n(lambda r)^2 r dr with Boost's Bessel function
// and 61-point Gauss-Kronrod on subintervals shorter than one oscillation.
double quadrature_norm(const DiskMode& m) {
  const int pieces = 4 + static_cast<int>(m.nu.lambda);
  double sum = 0.0;
  for (int p = 0; p < pieces; ++p) {
    const double a = static_cast<double>(p) / pieces;
    const double b = static_cast<double>(p + 1) / pieces;
    sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double r) {
          const double j = boost::math::cyl_bessel_j(m.nu.n, m.nu.lambda * r);
          return j * j * r;
        },
        a, b, 0, 0.0);
  }
  return 2.0 * std::numbers::pi * m.c * m.c * sum;
}

DiskMode mode_for(int n, int k) {
  const sf::BesselZero z = sf::bessel_zero(n, k);
  return {make_joint_eigenvalue(z.value, n, k), disk_norm_const(n, k, z)};
}

double default_delta(double lambda) { return std::pow(lambda, -1.0 / 3.0); }

}  // namespace

TEST_CASE("normalization constant against quadrature") {
  for (auto [n, k] : {std::pair{0, 1}, {0, 7}, {1, 1}, {3, 12}, {25, 4}, {150, 30}, {400, 3}}) {
    CAPTURE(n);
    CAPTURE(k);
    CHECK(quadrature_norm(mode_for(n, k)) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("disk_norm_const rejects mismatched zeros") {
  const sf::BesselZero z = sf::bessel_zero(2, 3);
  CHECK_THROWS_AS(disk_norm_const(2, 4, z), DomainError);
  CHECK_THROWS_AS(disk_norm_const(3, 3, z), DomainError);
  // A point that is not a zero at all but where J_{n+1} vanishes.
  const sf::BesselZero fake{0, 1, sf::bessel_zero(1, 1).value};
  CHECK_NOTHROW(disk_norm_const(0, 1, fake));
}

TEST_CASE("normalization constant scales like sqrt(n) (1 - mu)^{-1/4}") {
  // Sample n in {100,...,1000}, mu in [0.3, 0.9] and away from the turning
  // point by lambda^{-2/3+0.05}.
  double lo = 1e300, hi = 0.0, lemma_lo = 1e300, lemma_hi = 0.0;
  int samples = 0;
  for (int n = 100; n <= 1000; n += 100) {
    for (const auto& z : sf::bessel_zeros_in_interval(n, n / 0.9, n / 0.3)) {
      if (z.k % 7 != 0) continue;
      const double mu = n / z.value;
      if (mu > 1.0 - std::pow(z.value, -2.0 / 3.0 + 0.05)) continue;
      const double c = disk_norm_const(n, z.k, z);
      const double ratio = c / (std::sqrt(n) * std::pow(1.0 - mu, -0.25));
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      // Leading WKB value of the same ratio, 1 / (sqrt(2 mu) (1 + mu)^{1/4}).
      CHECK(ratio == doctest::Approx(1.0 / (std::sqrt(2.0 * mu) * std::pow(1.0 + mu, 0.25))).epsilon(0.02));
      // Norm of the unnormalized mode is 1/c; compare with (1-mu)^{1/4}/sqrt(n).
      const double lemma = (1.0 / c) / (std::pow(1.0 - mu, 0.25) / std::sqrt(n));
      lemma_lo = std::min(lemma_lo, lemma);
      lemma_hi = std::max(lemma_hi, lemma);
      ++samples;
    }
  }
  MESSAGE("c ratio range [" << lo << ", " << hi << "], norm ratio range [" << lemma_lo << ", "
                            << lemma_hi << "], samples " << samples);
  CHECK(samples > 200);
  // The range of 1/(sqrt(2 mu)(1+mu)^{1/4}) over mu in [0.3, 0.9] is [0.635, 1.209].
  CHECK(lo > 0.6);
  CHECK(hi < 1.25);
  CHECK(lemma_lo > 1.0 / 1.25);
  CHECK(lemma_hi < 1.0 / 0.6);
}

TEST_CASE("band members satisfy |n| < lambda and per-n uniqueness") {
  const Cutoff cutoff;
  for (double lambda : {100.0, 500.0, 1000.0}) {
    CAPTURE(lambda);
    const double delta = default_delta(lambda);
    const auto modes = disk_band_spectrum(lambda, delta, cutoff, 0.0);
    REQUIRE_FALSE(modes.empty());
    std::set<int> seen;
    for (const auto& m : modes) {
      CHECK(std::abs(m.nu.n) < m.nu.lambda);
      CHECK(std::fabs(m.nu.lambda - lambda) < 2.0 * delta);
      CHECK(m.nu.mu == std::abs(m.nu.n) / m.nu.lambda);
      CHECK(seen.insert(m.nu.n).second);
      CHECK(std::fabs(sf::bessel_j(m.nu.n, m.nu.lambda)) <= 1e-12);
    }
    // n = 0 is kept when its zero falls in the window.
    const auto j0 = sf::bessel_zeros_in_interval(0, lambda - 2 * delta, lambda + 2 * delta);
    CHECK(seen.count(0) == j0.size());
  }
}

TEST_CASE("band is complete: brute-force enumeration agrees") {
  const double lambda = 60.3;
  const double delta = default_delta(lambda);
  const auto modes = disk_band_spectrum(lambda, delta, Cutoff(), 0.0);
  std::set<std::pair<int, int>> expected;
  for (int n = 0; n < 70; ++n) {
    for (int k = 1;; ++k) {
      const double z = sf::bessel_zero(n, k).value;
      if (z >= lambda + 2 * delta) break;
      if (z > lambda - 2 * delta) expected.insert({n, k});
    }
  }
  std::set<std::pair<int, int>> got;
  for (const auto& m : modes) got.insert({m.nu.n, m.nu.k});
  CHECK(got == expected);
}

TEST_CASE("n_min_fraction filters the cone") {
  const double lambda = 300.0;
  const auto all = disk_band_spectrum(lambda, default_delta(lambda), Cutoff(), 0.0);
  const auto cone = disk_band_spectrum(lambda, default_delta(lambda), Cutoff(), 0.5);
  std::size_t expected = 0;
  for (const auto& m : all)
    if (m.nu.n >= 150) ++expected;
  CHECK(cone.size() == expected);
  CHECK_THROWS_AS(disk_band_spectrum(lambda, 1.0, Cutoff(), 1.0), DomainError);
  CHECK_THROWS_AS(disk_band_spectrum(5.0, 1.0, Cutoff(), 0.0), DomainError);
  CHECK_THROWS_AS(disk_band_spectrum(lambda, -1.0, Cutoff(), 0.0), DomainError);
}

TEST_CASE("band cardinality scales like lambda^{2/3}") {
  // Each mode with n > 0 counts twice. Weyl's law for the unit disk predicts
  // 2 * support * lambda^{2/3} / 2 = 2 lambda^{2/3} eigenfunctions in the window.
  double lo = 1e300, hi = 0.0;
  for (double lambda = 200.0 * 1.137; lambda <= 2000.0; lambda *= 1.5) {
    const auto modes = disk_band_spectrum(lambda, default_delta(lambda), Cutoff(), 0.0);
    double count = 0.0;
    for (const auto& m : modes) count += m.nu.n == 0 ? 1 : 2;
    const double ratio = count / std::pow(lambda, 2.0 / 3.0);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  MESSAGE("count / lambda^{2/3} in [" << lo << ", " << hi << "]");
  // Frozen from the first run, with margin.
  CHECK(lo > 1.6);
  CHECK(hi < 2.4);
}

TEST_CASE("eigenfunction boundary and centre values") {
  const auto modes = disk_band_spectrum(150.0, default_delta(150.0), Cutoff(), 0.0);
  for (const auto& m : modes) {
    CHECK(disk_eigenfunction_sq(m, 1.0) <= m.c * m.c * 1e-24);
    if (m.nu.n >= 1) CHECK(disk_eigenfunction_sq(m, 0.0) == 0.0);
    CHECK(disk_eigenfunction_sq(m, 1.5) == 0.0);
    CHECK(disk_eigenfunction_sq(m, -0.1) == 0.0);
  }
  const DiskMode m00 = mode_for(0, 1);
  CHECK(disk_eigenfunction_sq(m00, 0.0) == doctest::Approx(m00.c * m00.c));
}

TEST_CASE("parallel and cached band construction match serial bit for bit") {
  const double lambda = 700.0 * 1.137;
  const double delta = default_delta(lambda);
  const auto serial = disk_band_spectrum(lambda, delta, Cutoff(), 0.0);
  const auto parallel = disk_band_spectrum(lambda, delta, Cutoff(), 0.0, nullptr, Exec::parallel);

  const auto file = std::filesystem::temp_directory_path() / "caustica-disk-test-cache.bin";
  std::filesystem::remove(file);
  std::vector<DiskMode> cold, warm;
  std::size_t cold_evals = 0, warm_evals = 0;
  {
    ResultCache cache(file);
    const std::size_t before = sf::zero_search_evaluations();
    cold = disk_band_spectrum(lambda, delta, Cutoff(), 0.0, &cache);
    cold_evals = sf::zero_search_evaluations() - before;
  }
  {
    ResultCache cache(file);
    const std::size_t before = sf::zero_search_evaluations();
    warm = disk_band_spectrum(lambda, delta, Cutoff(), 0.0, &cache, Exec::parallel);
    warm_evals = sf::zero_search_evaluations() - before;
    CHECK(cache.misses() == 0);
  }
  CHECK(cold_evals > 0);
  CHECK(warm_evals == 0);
  for (const std::vector<DiskMode>* other : std::array<const std::vector<DiskMode>*, 3>{&parallel, &cold, &warm}) {
    REQUIRE(other->size() == serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(std::bit_cast<std::uint64_t>((*other)[i].nu.lambda) ==
            std::bit_cast<std::uint64_t>(serial[i].nu.lambda));
      CHECK(std::bit_cast<std::uint64_t>((*other)[i].c) == std::bit_cast<std::uint64_t>(serial[i].c));
      CHECK((*other)[i].nu.n == serial[i].nu.n);
      CHECK((*other)[i].nu.k == serial[i].nu.k);
    }
  }
}

TEST_CASE("ModeFamily view") {
  DiskModes family(disk_band_spectrum(120.0, default_delta(120.0), Cutoff(), 0.0));
  REQUIRE(family.size() > 0);
  for (std::size_t i = 0; i < family.size(); ++i)
    CHECK(family.multiplicity(i) == (family.eigenvalue(i).n == 0 ? 1 : 2));
  CHECK(family.caustic_distance(0.5, 0.75) == 0.25);
  CHECK(family.caustic_points(0.4) == std::vector<double>{0.4});
  CHECK(family.surface_id() == "disk");
}
