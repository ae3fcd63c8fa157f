#include <algorithm>
#include <array>
#include <memory>
#include <cmath>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include "caustica/errors.hpp"
#include "caustica/revolution.hpp"
#include "quadrature.hpp"

namespace caustica {
namespace {

constexpr std::size_t kMaxScan = 4096;

// Shrinks [lo, hi] around a sign change of f until the midpoint stops moving.
template <typename F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// Piecewise quintic Hermite interpolant through (s, y, y', y'').
class QuinticTable {
 public:
  explicit QuinticTable(std::vector<std::array<double, 4>> rows) : rows_(std::move(rows)) {
    coeffs_.resize(rows_.size() - 1);
    for (std::size_t i = 0; i + 1 < rows_.size(); ++i) {
      const auto& p = rows_[i];
      const auto& q = rows_[i + 1];
      const double h = q[0] - p[0];
      auto& c = coeffs_[i];
      c[0] = p[1];
      c[1] = h * p[2];
      c[2] = 0.5 * h * h * p[3];
      const double y = q[1] - (c[0] + c[1] + c[2]);
      const double d = h * q[2] - (c[1] + 2.0 * c[2]);
      const double s = h * h * q[3] - 2.0 * c[2];
      c[3] = 10.0 * y - 4.0 * d + 0.5 * s;
      c[4] = -15.0 * y + 7.0 * d - s;
      c[5] = 6.0 * y - 3.0 * d + 0.5 * s;
    }
  }

  // order 0, 1, 2: value, first, second derivative
  double eval(double s, int order) const {
    s = std::clamp(s, rows_.front()[0], rows_.back()[0]);
    auto it = std::upper_bound(rows_.begin(), rows_.end(), s,
                               [](double v, const std::array<double, 4>& r) { return v < r[0]; });
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - rows_.begin() - 1, 0));
    i = std::min(i, coeffs_.size() - 1);
    const double h = rows_[i + 1][0] - rows_[i][0];
    const double t = (s - rows_[i][0]) / h;
    const auto& c = coeffs_[i];
    if (order == 0) return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
    if (order == 1)
      return (c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])))) / h;
    return (2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5]))) / (h * h);
  }

 private:
  std::vector<std::array<double, 4>> rows_;
  std::vector<std::array<double, 6>> coeffs_;
};

}  // namespace

RevolutionProfile::RevolutionProfile(std::string id, double L, Fn a, Fn da, Fn dda)
    : id_(std::move(id)), L_(L), a_(std::move(a)), da_(std::move(da)), dda_(std::move(dda)) {
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("RevolutionProfile: L must be positive");
  std::size_t best = 0;
  double best_a = -1.0;
  for (std::size_t j = 0; j <= kMaxScan; ++j) {
    const double v = a_(L_ * j / kMaxScan);
    if (v > best_a) {
      best_a = v;
      best = j;
    }
  }
  const double lo = L_ * (best == 0 ? 0 : best - 1) / kMaxScan;
  const double hi = L_ * std::min(best + 1, kMaxScan) / kMaxScan;
  if (da_(lo) > 0.0 && da_(hi) < 0.0) {
    s_max_ = bisect([this](double s) { return da_(s); }, lo, hi);
  } else {
    s_max_ = L_ * best / kMaxScan;
  }
  A_ = a_(s_max_);
}

RevolutionProfile RevolutionProfile::round() {
  return {"round", std::numbers::pi, [](double s) { return std::sin(s); },
          [](double s) { return std::cos(s); }, [](double s) { return -std::sin(s); }};
}

RevolutionProfile RevolutionProfile::perturbed(double eps) {
  if (!std::isfinite(eps)) throw DomainError("perturbed: eps must be finite");
  std::ostringstream id;
  id.precision(17);
  id << "perturbed(" << eps << ")";
  return {id.str(), std::numbers::pi, [eps](double s) { return std::sin(s) + eps * std::sin(2.0 * s); },
          [eps](double s) { return std::cos(s) + 2.0 * eps * std::cos(2.0 * s); },
          [eps](double s) { return -std::sin(s) - 4.0 * eps * std::sin(2.0 * s); }};
}

RevolutionProfile RevolutionProfile::from_table(std::string id, std::vector<std::array<double, 4>> rows) {
  if (rows.size() < 3) throw DomainError("profile table: need at least 3 rows");
  if (rows.front()[0] != 0.0) throw DomainError("profile table: first s must be 0");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (double v : rows[i])
      if (!std::isfinite(v)) throw DomainError("profile table: non-finite entry in row " + std::to_string(i + 1));
    if (i > 0 && !(rows[i][0] > rows[i - 1][0]))
      throw DomainError("profile table: s not strictly increasing at row " + std::to_string(i + 1));
  }
  const double L = rows.back()[0];
  auto table = std::make_shared<QuinticTable>(std::move(rows));
  return {std::move(id), L, [table](double s) { return table->eval(s, 0); },
          [table](double s) { return table->eval(s, 1); }, [table](double s) { return table->eval(s, 2); }};
}

RevolutionProfile RevolutionProfile::from_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DomainError("profile table: cannot open " + file.string());
  std::vector<std::array<double, 4>> rows;
  std::string line;
  std::uint64_t hash = 1469598103934665603ull;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (unsigned char ch : line) hash = (hash ^ ch) * 1099511628211ull;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::array<double, 4> row{};
    if (!(fields >> row[0] >> row[1] >> row[2] >> row[3])) {
      if (rows.empty()) continue;  // header line
      throw DomainError("profile table: " + file.string() + " line " + std::to_string(line_no) +
                        ": expected s, a, a', a''");
    }
    rows.push_back(row);
  }
  std::ostringstream id;
  id << "table:" << file.filename().string() << ":" << std::hex << hash;
  return from_table(id.str(), std::move(rows));
}

RevolutionProfile RevolutionProfile::from_spec(const std::string& spec) {
  if (spec == "round") return round();
  static const std::regex perturbed_re(R"(perturbed\(\s*([-+0-9.eE]+)\s*\))");
  std::smatch m;
  if (std::regex_match(spec, m, perturbed_re)) {
    std::size_t used = 0;
    double eps = 0.0;
    try {
      eps = std::stod(m[1].str(), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != m[1].str().size()) throw DomainError("profile: bad number in " + spec);
    return perturbed(eps);
  }
  if (spec.rfind("table:", 0) == 0) return from_csv(spec.substr(6));
  throw DomainError("profile: unknown profile '" + spec + "' (round, perturbed(EPS), table:PATH)");
}

ProfileReport validate_profile(const RevolutionProfile& p, std::size_t grid_points) {
  ProfileReport report;
  grid_points = std::max<std::size_t>(grid_points, 10000);
  report.grid_points = grid_points;
  const auto fail = [&](std::string what) {
    report.ok = false;
    report.failures.push_back(std::move(what));
  };
  const double L = p.L();
  const double scale = std::max(1.0, std::fabs(p.A()));
  const double tol = 1e-10 * scale;
  if (!(std::fabs(p.a(0.0)) <= tol)) fail("boundary: a(0) = " + fmt(p.a(0.0)) + " != 0");
  if (!(std::fabs(p.a(L)) <= tol)) fail("boundary: a(L) = " + fmt(p.a(L)) + " != 0");

  const double step = L / static_cast<double>(grid_points - 1);
  bool positive = true;
  int sign_changes = 0;
  int last_sign = 0;
  std::string first_extra_critical;
  for (std::size_t j = 1; j + 1 < grid_points; ++j) {
    const double s = step * static_cast<double>(j);
    const double v = p.a(s);
    if (positive && !(v > 0.0)) {
      fail("positivity: a(" + fmt(s) + ") = " + fmt(v) + " <= 0");
      positive = false;
    }
    const double d = p.da(s);
    const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (sign == 0) {
      if (std::fabs(s - p.s_max()) > step && first_extra_critical.empty()) first_extra_critical = fmt(s);
      continue;
    }
    if (last_sign != 0 && sign != last_sign) {
      ++sign_changes;
      if (std::fabs(s - p.s_max()) > 2.0 * step && first_extra_critical.empty()) first_extra_critical = fmt(s);
    }
    last_sign = sign;
  }
  if (!(p.A() > 0.0)) fail("maximum: sup a = " + fmt(p.A()) + " <= 0");
  if (!(std::fabs(p.da(p.s_max())) <= 1e-8 * scale)) fail("critical point: a'(s_max) = " + fmt(p.da(p.s_max())));
  if (!(p.dda(p.s_max()) < 0.0))
    fail("nondegenerate maximum: a''(s_max) = " + fmt(p.dda(p.s_max())) + " >= 0");
  if (sign_changes != 1 || !first_extra_critical.empty()) {
    fail("single critical point: a' changes sign " + std::to_string(sign_changes) + " times" +
         (first_extra_critical.empty() ? std::string() : ", extra critical point near s = " + first_extra_critical));
  }
  return report;
}

std::pair<double, double> rev_caustics(const RevolutionProfile& p, double mu) {
  if (!(mu > 0.0) || !(mu < p.A())) throw DomainError("rev_caustics: need 0 < mu < A");
  const auto f = [&](double s) { return p.a(s) - mu; };
  return {bisect(f, 0.0, p.s_max()), bisect(f, p.s_max(), p.L())};
}

namespace {

constexpr std::size_t kActionNodes = 160;

// Integrates g(s, theta-weight) over [s_-, s_+] with s = s_- + (s_+ - s_-) sin^2(theta/2).
template <typename G>
double caustic_substitution(double s_lo, double s_hi, G&& g) {
  const auto& rule = detail::gauss_legendre(kActionNodes);
  const double span = s_hi - s_lo;
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double theta = 0.5 * std::numbers::pi * (rule.nodes[i] + 1.0);
    const double half = std::sin(0.5 * theta);
    const double s = s_lo + span * half * half;
    const double ds = 0.5 * span * std::sin(theta) * 0.5 * std::numbers::pi;
    sum += rule.weights[i] * g(s, half) * ds;
  }
  return sum;
}

}  // namespace

double action_integral(const RevolutionProfile& p, double mu) {
  mu = std::fabs(mu);
  if (mu >= p.A()) return 0.0;
  if (mu == 0.0) return p.L() / std::numbers::pi;
  const auto [s_lo, s_hi] = rev_caustics(p, mu);
  const double sum = caustic_substitution(s_lo, s_hi, [&](double s, double) {
    const double r = mu / p.a(s);
    return std::sqrt(std::max(0.0, 1.0 - r * r));
  });
  return sum / std::numbers::pi;
}

double action_integral_derivative(const RevolutionProfile& p, double mu) {
  const double sign = mu < 0.0 ? -1.0 : 1.0;
  mu = std::fabs(mu);
  if (mu == 0.0) return 0.0;
  if (mu >= p.A()) throw DomainError("action_integral_derivative: |mu| >= A");
  const auto [s_lo, s_hi] = rev_caustics(p, mu);
  // The integrand 1/(a sqrt(a^2 - mu^2)) has inverse square-root endpoint
  // singularities; the substitution turns ds/sqrt(s - s_-) into a smooth
  // density, and at the nodes a > mu strictly.
  const double sum = caustic_substitution(s_lo, s_hi, [&](double s, double) {
    const double a = p.a(s);
    return 1.0 / (a * std::sqrt(std::max((a - mu) * (a + mu), 1e-300)));
  });
  return -sign * mu / std::numbers::pi * sum;
}

std::string to_string(Genericity g) {
  switch (g) {
    case Genericity::generic: return "generic";
    case Genericity::degenerate: return "degenerate";
    case Genericity::degenerate_flat: return "degenerate-flat";
    case Genericity::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

GenericityReport genericity_check(const RevolutionProfile& p, const GenericityOptions& opt) {
  if (!(opt.mu_lo > 0.0 && opt.mu_lo < opt.mu_hi && opt.mu_hi < 1.0) || opt.samples < 8)
    throw DomainError("genericity_check: bad sampling options");
  const double A = p.A();
  // I_1' carries ~1e-11 quadrature error near the ends of its range; a wide
  // difference step keeps that well below the flatness threshold.
  const double dmu = 2e-3 * A;
  const auto kappa_at = [&](double mu) {
    const double d1 = action_integral_derivative(p, mu);
    const double d2 = (action_integral_derivative(p, mu + dmu) - action_integral_derivative(p, mu - dmu)) / (2.0 * dmu);
    return -d2 / std::pow(1.0 + d1 * d1, 1.5);
  };

  GenericityReport report;
  const std::size_t m = opt.samples;
  report.mu.resize(m);
  report.action.resize(m);
  report.kappa.resize(m);
  bool finite = true;
  for (std::size_t i = 0; i < m; ++i) {
    const double mu = A * (opt.mu_lo + (opt.mu_hi - opt.mu_lo) * i / (m - 1.0));
    report.mu[i] = mu;
    report.action[i] = action_integral(p, mu);
    report.kappa[i] = kappa_at(mu);
    finite = finite && std::isfinite(report.kappa[i]) && std::isfinite(report.action[i]);
    report.kappa_max = std::max(report.kappa_max, std::fabs(report.kappa[i]));
    if (i > 0 && !(report.action[i] < report.action[i - 1])) report.action_decreasing = false;
  }
  if (!finite) return report;  // inconclusive
  if (report.kappa_max < opt.flat_threshold) {
    report.verdict = Genericity::degenerate_flat;
    return report;
  }

  const double zero_level = opt.zero_threshold * report.kappa_max;
  const double slope_level = opt.slope_threshold * report.kappa_max / A;
  const double dk = 1e-3 * A;
  bool all_nondegenerate = true;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double k0 = report.kappa[i], k1 = report.kappa[i + 1];
    const bool crossing = (k0 < 0.0) != (k1 < 0.0) && std::fabs(k0) > zero_level;
    const bool touching = std::fabs(k1) <= zero_level && i + 1 < m - 1;
    if (!crossing && !touching) continue;
    CurvatureZero z;
    z.mu = crossing ? bisect(kappa_at, report.mu[i], report.mu[i + 1]) : report.mu[i + 1];
    z.dkappa = (kappa_at(z.mu + dk) - kappa_at(z.mu - dk)) / (2.0 * dk);
    z.nondegenerate = std::fabs(z.dkappa) >= slope_level;
    all_nondegenerate = all_nondegenerate && z.nondegenerate;
    report.zeros.push_back(z);
  }
  report.verdict = all_nondegenerate ? Genericity::generic : Genericity::degenerate;
  return report;
}

}  // namespace caustica
