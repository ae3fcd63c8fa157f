#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "caustica/cache.hpp"
#include "caustica/errors.hpp"
#include "caustica/parallel.hpp"
#include "caustica/revolution.hpp"

namespace caustica {
namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

// LU factorization with partial pivoting of a shifted symmetric tridiagonal
// matrix (the same scheme as LAPACK's gttrf/gtts2).
class TridiagonalLU {
 public:
  TridiagonalLU(const std::vector<double>& diag, const std::vector<double>& off, double shift)
      : d_(diag.size()), du_(off), dl_(off), du2_(diag.size(), 0.0), swap_(diag.size(), false) {
    const std::size_t n = d_.size();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d_[i] = diag[i] - shift;
      scale = std::max(scale, std::fabs(diag[i]));
    }
    floor_ = std::max(scale, 1.0) * std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::fabs(d_[i]) >= std::fabs(dl_[i])) {
        if (d_[i] == 0.0) d_[i] = floor_;
        const double fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      } else {
        const double fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        const double temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < n) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
        swap_[i] = true;
      }
    }
    for (double& v : d_)
      if (std::fabs(v) < floor_) v = v < 0.0 ? -floor_ : floor_;
  }

  void solve(std::vector<double>& b) const {
    const std::size_t n = d_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!swap_[i]) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        const double temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl_[i] * b[i];
      }
    }
    b[n - 1] /= d_[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
    for (std::size_t i = n - 2; i-- > 0;) b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
  }

 private:
  std::vector<double> d_, du_, dl_, du2_;
  std::vector<bool> swap_;
  double floor_ = 0.0;
};

std::string radial_key(const std::string& profile_id, std::size_t cells, int n, double lo, double hi,
                       const RadialOptions& o) {
  std::ostringstream key;
  key << "rev/" << profile_id << "/N=" << cells << "/n=" << n << "/lo=" << key_bits(lo)
      << "/hi=" << key_bits(hi) << "/f=" << key_bits(o.truncation_factor)
      << "/act=" << key_bits(o.truncation_action) << "/R=" << (o.richardson ? 1 : 0);
  return key.str();
}

}  // namespace

RadialGrid make_radial_grid(const RevolutionProfile& profile, std::size_t cells) {
  if (cells < 16) throw DomainError("make_radial_grid: need at least 16 cells");
  RadialGrid g;
  g.cells = cells;
  g.h = profile.L() / static_cast<double>(cells);
  g.a_center.resize(cells);
  g.a_face.resize(cells + 1);
  for (std::size_t i = 0; i < cells; ++i) g.a_center[i] = profile.a((i + 0.5) * g.h);
  for (std::size_t i = 1; i < cells; ++i) g.a_face[i] = profile.a(i * g.h);
  g.a_face[0] = 0.0;
  g.a_face[cells] = 0.0;
  return g;
}

RadialOperator::RadialOperator(const RadialGrid& grid, int n, double hi, const RadialOptions& options)
    : h_(grid.h) {
  n = std::abs(n);
  const auto& ac = grid.a_center;
  const std::size_t peak = static_cast<std::size_t>(std::max_element(ac.begin(), ac.end()) - ac.begin());
  std::size_t first = 0, last = grid.cells - 1;
  if (n > 0) {
    const double nn = static_cast<double>(n);
    const double keep_a = nn / (options.truncation_factor * hi);
    const auto barrier = [&](std::size_t i) {
      const double v = nn / ac[i];
      return v > hi ? std::sqrt((v - hi) * (v + hi)) * h_ : 0.0;
    };
    double action = 0.0;
    first = peak;
    while (first > 0 && ac[first - 1] > 0.0 && (ac[first - 1] >= keep_a || action < options.truncation_action)) {
      --first;
      action += barrier(first);
    }
    action = 0.0;
    last = peak;
    while (last + 1 < grid.cells && ac[last + 1] > 0.0 &&
           (ac[last + 1] >= keep_a || action < options.truncation_action)) {
      ++last;
      action += barrier(last);
    }
  }
  first_ = first;
  const std::size_t m = last - first + 1;
  diag_.resize(m);
  off_.resize(m > 0 ? m - 1 : 0);
  off_sq_.resize(off_.size());
  const double ih2 = 1.0 / (h_ * h_);
  const double n2 = static_cast<double>(n) * n;
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t i = first + j;
    diag_[j] = (grid.a_face[i] + grid.a_face[i + 1]) * ih2 / ac[i] + n2 / (ac[i] * ac[i]);
    if (j + 1 < m) {
      off_[j] = -grid.a_face[i + 1] * ih2 / std::sqrt(ac[i] * ac[i + 1]);
      off_sq_[j] = off_[j] * off_[j];
    }
  }
  lower_ = std::numeric_limits<double>::infinity();
  upper_ = -lower_;
  for (std::size_t j = 0; j < m; ++j) {
    const double r = (j > 0 ? std::fabs(off_[j - 1]) : 0.0) + (j + 1 < m ? std::fabs(off_[j]) : 0.0);
    lower_ = std::min(lower_, diag_[j] - r);
    upper_ = std::max(upper_, diag_[j] + r);
  }
  lower_ = std::max(lower_, -1.0);  // the operator is positive semidefinite
}

std::size_t RadialOperator::count_below(double x) const {
  const std::size_t m = diag_.size();
  const double pivmin = kTiny * std::max(1.0, upper_ * upper_);
  std::size_t count = 0;
  double q = diag_[0] - x;
  if (std::fabs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t j = 1; j < m; ++j) {
    q = diag_[j] - x - off_sq_[j - 1] / q;
    if (std::fabs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

double RadialOperator::eigenvalue(std::size_t index) const {
  if (index >= size()) throw IndexError("RadialOperator::eigenvalue: index out of range");
  double lo = lower_, hi = upper_;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(mid))
      break;
    if (count_below(mid) > index) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> RadialOperator::eigenvalues(std::size_t i0, std::size_t i1, double lo, double hi) const {
  if (i1 <= i0) return {};
  if (i1 > size()) throw IndexError("RadialOperator::eigenvalues: index out of range");
  lo = std::max(lo, lower_);
  hi = std::min(hi, upper_);
  if (count_below(lo) > i0) lo = lower_;
  if (count_below(hi) < i1) hi = upper_;
  std::vector<double> lower(i1 - i0, lo), upper(i1 - i0, hi);
  std::vector<double> out(i1 - i0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const std::size_t index = i0 + j;
    double a = lower[j], b = upper[j];
    for (int iter = 0; iter < 200 && b - a > 1e-9 * std::fabs(b); ++iter) {
      const double mid = 0.5 * (a + b);
      const std::size_t c = count_below(mid);
      // Every count narrows the brackets of all pending indices.
      for (std::size_t t = j; t < out.size(); ++t) {
        if (i0 + t < c) {
          upper[t] = std::min(upper[t], mid);
        } else {
          lower[t] = std::max(lower[t], mid);
        }
      }
      if (c > index) {
        b = mid;
      } else {
        a = mid;
      }
    }
    // Inverse iteration at the bracket midpoint converges in a few steps
    // because the bracket is far narrower than the eigenvalue gap; the
    // Rayleigh quotient is then accurate to rounding.
    const std::vector<double> w = eigenvector(0.5 * (a + b));
    const std::vector<double> tw = apply(w);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      num += w[i] * tw[i];
      den += w[i] * w[i];
    }
    out[j] = std::clamp(num / den, a, b);
  }
  return out;
}

std::vector<double> RadialOperator::eigenvector(double lambda_sq) const {
  const std::size_t m = size();
  std::vector<double> w(m);
  if (m == 1) {
    w[0] = 1.0 / std::sqrt(h_);
    return w;
  }
  // Deterministic start with no symmetry.
  for (std::size_t j = 0; j < m; ++j) w[j] = 1.0 + 0.5 * std::sin(0.7 * j + 0.3);
  const TridiagonalLU lu(diag_, off_, lambda_sq);
  for (int iter = 0; iter < 3; ++iter) {
    lu.solve(w);
    double norm = 0.0;
    for (double v : w) norm += v * v;
    norm = std::sqrt(norm * h_);
    for (double& v : w) v /= norm;
  }
  const auto big = std::max_element(w.begin(), w.end(), [](double a, double b) { return std::fabs(a) < std::fabs(b); });
  if (*big < 0.0)
    for (double& v : w) v = -v;
  return w;
}

std::vector<double> RadialOperator::apply(const std::vector<double>& w) const {
  const std::size_t m = size();
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    double v = diag_[j] * w[j];
    if (j > 0) v += off_[j - 1] * w[j - 1];
    if (j + 1 < m) v += off_[j] * w[j + 1];
    out[j] = v;
  }
  return out;
}

std::vector<RevolutionMode> radial_spectrum(const RevolutionProfile& profile, const RadialGrid& fine,
                                            const RadialGrid* coarse, int n, double lo, double hi,
                                            const RadialOptions& options, ResultCache* cache) {
  if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) throw DomainError("radial_spectrum: need 0 <= lo < hi");
  n = std::abs(n);
  if (static_cast<double>(n) >= profile.A() * hi) return {};
  if (hi * fine.h > options.max_lambda_h) {
    std::ostringstream msg;
    msg << "radial_spectrum: grid too coarse, lambda*h = " << hi * fine.h << " > " << options.max_lambda_h
        << " (use at least " << static_cast<std::size_t>(std::ceil(hi * profile.L() / options.max_lambda_h))
        << " cells)";
    throw ResolutionError(msg.str());
  }
  if (options.richardson && coarse == nullptr) throw DomainError("radial_spectrum: coarse grid required");

  const RadialOperator op(fine, n, hi, options);

  // (lambda^2 on the fine grid, extrapolated lambda, 1-based index) per mode.
  std::vector<double> found;
  std::string key;
  bool hit = false;
  if (cache != nullptr) {
    key = radial_key(profile.id(), fine.cells, n, lo, hi, options);
    if (auto v = cache->get(key)) {
      found = std::move(*v);
      hit = true;
    }
  }
  if (!hit) {
    // Grid eigenvalues sit below the true ones by about (lambda h)^2/12 relative.
    const double widen = 4.0 * (hi * fine.h) * (hi * fine.h) + 1e-12;
    const double lo_sq = lo * lo * (1.0 - widen);
    const double hi_sq = hi * hi * (1.0 + widen);
    const std::size_t i0 = op.count_below(lo_sq);
    const std::size_t i1 = op.count_below(hi_sq);
    const std::vector<double> fine_sq = op.eigenvalues(i0, i1, lo_sq, hi_sq);
    std::vector<double> coarse_sq;
    if (options.richardson && i1 > i0) {
      const RadialOperator coarse_op(*coarse, n, hi, options);
      // The coarse grid's error is four times larger and of the same sign.
      const double coarse_widen = 4.0 * widen;
      const std::size_t c1 = std::min(i1, coarse_op.size());
      coarse_sq = coarse_op.eigenvalues(std::min(i0, c1), c1, lo_sq * (1.0 - coarse_widen),
                                        hi_sq * (1.0 + coarse_widen));
    }
    for (std::size_t j = 0; j < fine_sq.size(); ++j) {
      double lambda_sq = fine_sq[j];
      if (options.richardson && j < coarse_sq.size()) lambda_sq = (4.0 * fine_sq[j] - coarse_sq[j]) / 3.0;
      const double lambda = std::sqrt(std::max(lambda_sq, 0.0));
      if (lambda < lo || lambda > hi) continue;
      found.push_back(fine_sq[j]);
      found.push_back(lambda);
      found.push_back(static_cast<double>(i0 + j + 1));
    }
    if (cache != nullptr) cache->put(key, found);
  }

  std::vector<RevolutionMode> modes;
  for (std::size_t j = 0; j + 2 < found.size(); j += 3) {
    RevolutionMode mode;
    // k is the Sturm index on the (truncated) fine grid, 1-based.
    mode.nu = make_joint_eigenvalue(found[j + 1], n, static_cast<int>(found[j + 2]));
    mode.lambda_sq_grid = found[j];
    mode.w = op.eigenvector(found[j]);
    mode.first_cell = op.first_cell();
    mode.h = fine.h;
    mode.grid_cells = fine.cells;
    mode.psi.resize(mode.w.size());
    for (std::size_t i = 0; i < mode.w.size(); ++i)
      mode.psi[i] = mode.w[i] / std::sqrt(fine.a_center[mode.first_cell + i]);
    modes.push_back(std::move(mode));
  }
  return modes;
}

std::vector<RevolutionMode> radial_spectrum(const RevolutionProfile& profile, int n, double lo, double hi,
                                            const RadialOptions& options, ResultCache* cache) {
  if (options.richardson && options.grid_points % 2 != 0)
    throw DomainError("radial_spectrum: grid_points must be even for extrapolation");
  const RadialGrid fine = make_radial_grid(profile, options.grid_points);
  if (!options.richardson) return radial_spectrum(profile, fine, nullptr, n, lo, hi, options, cache);
  const RadialGrid coarse = make_radial_grid(profile, options.grid_points / 2);
  return radial_spectrum(profile, fine, &coarse, n, lo, hi, options, cache);
}

std::vector<RevolutionMode> rev_band_spectrum(const RevolutionProfile& profile, double lambda, double delta,
                                              const Cutoff& cutoff, double cone_eps,
                                              const RevBandOptions& options) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("rev_band_spectrum: lambda must be positive");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("rev_band_spectrum: delta must be positive");
  if (!(cone_eps > 0.0 && cone_eps < profile.A())) throw DomainError("rev_band_spectrum: cone_eps outside (0, A)");
  if (options.n_min < 0) throw DomainError("rev_band_spectrum: n_min < 0");
  const double half = cutoff.support() * delta;
  const double lo = std::max(lambda - half, 0.0);
  const double hi = lambda + half;
  const int n_hi = static_cast<int>(std::floor((profile.A() - cone_eps) * hi));
  if (n_hi < options.n_min) return {};

  const auto& ro = options.radial;
  if (ro.richardson && ro.grid_points % 2 != 0)
    throw DomainError("rev_band_spectrum: grid_points must be even for extrapolation");
  const RadialGrid fine = make_radial_grid(profile, ro.grid_points);
  RadialGrid coarse;
  if (ro.richardson) coarse = make_radial_grid(profile, ro.grid_points / 2);

  const std::size_t count = static_cast<std::size_t>(n_hi - options.n_min + 1);
  std::vector<std::vector<RevolutionMode>> per_n(count);
  for_each_index(count, options.exec, [&](std::size_t i) {
    const int n = options.n_min + static_cast<int>(i);
    for (auto& m : radial_spectrum(profile, fine, ro.richardson ? &coarse : nullptr, n, lo, hi, ro, options.cache))
      if (std::fabs(m.nu.lambda - lambda) < half) per_n[i].push_back(std::move(m));
  });
  std::vector<RevolutionMode> out;
  for (auto& v : per_n)
    for (auto& m : v) out.push_back(std::move(m));
  return out;
}

double rev_eigenfunction_sq(const RevolutionMode& mode, double s) {
  const long m = static_cast<long>(mode.psi.size());
  if (m == 0 || !(s >= 0.0) || !(s <= mode.h * mode.grid_cells)) return 0.0;
  const bool left_pole = mode.first_cell == 0;
  const bool right_pole = mode.first_cell + mode.psi.size() == mode.grid_cells;
  const double parity = mode.nu.n % 2 == 0 ? 1.0 : -1.0;
  // Samples beyond the stored range: mirror images across a pole (psi has
  // parity (-1)^n there), zero past a truncation end.
  const auto sample = [&](long j) -> double {
    if (j >= 0 && j < m) return mode.psi[static_cast<std::size_t>(j)];
    if (j < 0) return left_pole && -1 - j < m ? parity * mode.psi[static_cast<std::size_t>(-1 - j)] : 0.0;
    const long r = 2 * m - 1 - j;
    return right_pole && r >= 0 ? parity * mode.psi[static_cast<std::size_t>(r)] : 0.0;
  };
  // Continuous local index: cell centres sit at integers 0 .. m-1.
  const double x = s / mode.h - 0.5 - static_cast<double>(mode.first_cell);
  if ((!left_pole && x <= -1.0) || (!right_pole && x >= m)) return 0.0;
  const long j = static_cast<long>(std::floor(x));
  const double t = x - static_cast<double>(j);
  // Four-point Lagrange interpolation on j-1, j, j+1, j+2.
  const double p0 = sample(j - 1), p1 = sample(j), p2 = sample(j + 1), p3 = sample(j + 2);
  const double psi = -t * (t - 1.0) * (t - 2.0) / 6.0 * p0 + (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0 * p1 -
                     (t + 1.0) * t * (t - 2.0) / 2.0 * p2 + (t + 1.0) * t * (t - 1.0) / 6.0 * p3;
  return psi * psi / (2.0 * std::numbers::pi);
}

std::vector<double> RevolutionModes::caustic_points(double mu) const {
  mu = std::fabs(mu);
  if (mu == 0.0) return {0.0, profile_.L()};
  if (mu >= profile_.A()) return {profile_.s_max()};
  const auto [a, b] = rev_caustics(profile_, mu);
  return {a, b};
}

double RevolutionModes::caustic_distance(double mu, double s) const {
  double d = std::numeric_limits<double>::infinity();
  for (double c : caustic_points(mu)) d = std::min(d, std::fabs(s - c));
  return d;
}

}  // namespace caustica
