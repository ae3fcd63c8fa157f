#include "caustica/disk.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "caustica/cache.hpp"
#include "caustica/errors.hpp"
#include "caustica/parallel.hpp"

namespace caustica {
namespace {

std::string zeros_key(int n, double lo, double hi) {
  return "disk/zeros/n=" + std::to_string(n) + "/lo=" + key_bits(lo) + "/hi=" + key_bits(hi);
}

// Zeros of J_n in [lo, hi] as (k, value) pairs flattened into doubles.
std::vector<double> zeros_in_window(int n, double lo, double hi, ResultCache* cache) {
  std::string key;
  if (cache != nullptr) {
    key = zeros_key(n, lo, hi);
    if (auto hit = cache->get(key)) return std::move(*hit);
  }
  std::vector<double> flat;
  for (const auto& z : specfun::bessel_zeros_in_interval(n, lo, hi)) {
    flat.push_back(z.k);
    flat.push_back(z.value);
  }
  if (cache != nullptr) cache->put(key, flat);
  return flat;
}

}  // namespace

double disk_norm_const(int n, int k, const specfun::BesselZero& zero) {
  if (zero.n != n || zero.k != k) throw DomainError("disk_norm_const: zero does not match (n, k)");
  const double next = std::fabs(specfun::bessel_j_triple(n, zero.value).next);
  if (next < 1e-300) {
    std::ostringstream diag;
    diag.precision(17);
    diag << "n=" << n << " k=" << k << " lambda=" << zero.value << " |J_{n+1}|=" << next;
    throw NumericalError("disk_norm_const: J_{n+1} vanishes at the zero", diag.str());
  }
  return 1.0 / (std::sqrt(std::numbers::pi) * next);
}

std::vector<DiskMode> disk_band_spectrum(double lambda, double delta, const Cutoff& cutoff,
                                         double n_min_fraction, ResultCache* cache, Exec exec) {
  if (!(lambda >= 10.0) || !std::isfinite(lambda)) throw DomainError("disk_band_spectrum: lambda < 10");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("disk_band_spectrum: delta <= 0");
  if (!(n_min_fraction >= 0.0 && n_min_fraction < 1.0))
    throw DomainError("disk_band_spectrum: n_min_fraction outside [0, 1)");

  const double half = cutoff.support() * delta;
  const double lo = std::max(lambda - half, 0.0);
  const double hi = lambda + half;
  const int n_lo = static_cast<int>(std::ceil(n_min_fraction * lambda));
  const int n_hi = static_cast<int>(std::ceil(hi));  // zeros of J_n exceed n
  if (n_hi < n_lo) return {};

  const std::size_t count = static_cast<std::size_t>(n_hi - n_lo + 1);
  std::vector<std::vector<DiskMode>> per_n(count);
  for_each_index(count, exec, [&](std::size_t i) {
    const int n = n_lo + static_cast<int>(i);
    const std::vector<double> flat = zeros_in_window(n, lo, hi, cache);
    for (std::size_t j = 0; j + 1 < flat.size(); j += 2) {
      const specfun::BesselZero z{n, static_cast<int>(flat[j]), flat[j + 1]};
      if (!(std::fabs(z.value - lambda) < half)) continue;
      per_n[i].push_back({make_joint_eigenvalue(z.value, n, z.k), disk_norm_const(n, z.k, z)});
    }
  });

  std::vector<DiskMode> out;
  for (auto& v : per_n) out.insert(out.end(), v.begin(), v.end());
  return out;
}

double disk_eigenfunction_sq(const DiskMode& mode, double r) {
  if (!(r >= 0.0 && r <= 1.0)) return 0.0;
  const double j = specfun::bessel_j(mode.nu.n, mode.nu.lambda * r);
  return mode.c * mode.c * j * j;
}

double DiskModes::caustic_distance(double mu, double r) const { return std::fabs(r - mu); }

}  // namespace caustica
