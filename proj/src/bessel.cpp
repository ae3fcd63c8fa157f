#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "caustica/errors.hpp"
#include "caustica/specfun.hpp"

namespace caustica::specfun {
namespace {

constexpr int kMaxOrder = 100000;
constexpr double kMaxArgument = 1e5;
constexpr double kSeriesLimit = 2.0;
constexpr double kHankelMinArgument = 25.0;
constexpr double kRescaleAbove = 1e250;
constexpr double kRescaleBy = 1e-250;

std::atomic<std::size_t> g_zero_search_evaluations{0};

void check_arguments(int n, double x) {
  if (n < 0 || n > kMaxOrder) throw DomainError("bessel_j: order outside [0, 1e5]");
  if (!std::isfinite(x)) throw DomainError("bessel_j: non-finite argument");
  if (x < 0.0) throw DomainError("bessel_j: negative argument");
  if (x > kMaxArgument) throw DomainError("bessel_j: argument > 1e5");
}

// Debye exponent of J_m(x) for m > x; far below the double range the value is zero.
bool underflows(int m, double x) {
  if (m <= 0 || x >= m - 1.0) return false;
  const double w = x / m;
  const double s = std::sqrt((1.0 - w) * (1.0 + w));
  const double exponent = m * (s - std::atanh(s)) - 0.5 * std::log(2.0 * std::numbers::pi * m * s);
  return exponent < -760.0;
}

double series(int m, double x) {
  const double half = 0.5 * x;
  double prefactor = 1.0;
  for (int i = 1; i <= m && prefactor != 0.0; ++i) prefactor *= half / i;
  if (prefactor == 0.0) return 0.0;
  const double q = -half * half;
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j < 100; ++j) {
    term *= q / (static_cast<double>(j) * (m + j));
    sum += term;
    if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
  }
  return prefactor * sum;
}

// Large-argument Hankel expansion; false when the series does not settle.
bool hankel(int m, double x, double& out) {
  const double mu = 4.0 * static_cast<double>(m) * m;
  const double inv8x = 1.0 / (8.0 * x);
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double last = 1.0;
  bool settled = false;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) * inv8x / k;
    const double mag = std::fabs(term);
    if (mag > last && k > 1) break;
    const int half = (k - (k % 2)) / 2;
    const double sign = (half % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sign * term;
    } else {
      q += sign * term;
    }
    last = mag;
    if (mag < 1e-17) {
      settled = true;
      break;
    }
    if (term == 0.0) {
      settled = true;
      break;
    }
  }
  if (!settled) return false;
  const long double omega =
      static_cast<long double>(x) -
      (0.5L * m + 0.25L) * 3.14159265358979323846264338327950288L;
  const double c = static_cast<double>(std::cos(omega));
  const double s = static_cast<double>(std::sin(omega));
  out = std::sqrt(2.0 / (std::numbers::pi * x)) * (p * c - q * s);
  return true;
}

// Miller's backward recurrence normalized by J_0 + 2 sum J_{2k} = 1.
BesselTriple miller(int n, double x) {
  const int top = std::max(n, static_cast<int>(std::ceil(x)));
  int start = top + 20 + static_cast<int>(16.0 * std::cbrt(static_cast<double>(top)));
  if (start % 2 != 0) ++start;
  const double inv = 2.0 / x;
  double above = 0.0;  // J_{j+1}
  double cur = 1e-30;  // J_j
  double even_sum = 0.0;
  double jm1 = 0.0, j0 = 0.0, jp1 = 0.0;
  for (int j = start; j > 0; --j) {
    const double below = j * inv * cur - above;
    above = cur;
    cur = below;
    const int idx = j - 1;
    if (idx == n + 1) jp1 = cur;
    if (idx == n) j0 = cur;
    if (idx == n - 1) jm1 = cur;
    if (idx > 0 && idx % 2 == 0) even_sum += cur;
    if (std::fabs(cur) > kRescaleAbove) {
      cur *= kRescaleBy;
      above *= kRescaleBy;
      even_sum *= kRescaleBy;
      jm1 *= kRescaleBy;
      j0 *= kRescaleBy;
      jp1 *= kRescaleBy;
    }
  }
  const double norm = cur + 2.0 * even_sum;
  if (n == 0) jm1 = -jp1;
  return {jm1 / norm, j0 / norm, jp1 / norm};
}

BesselTriple triple_unchecked(int n, double x) {
  if (x == 0.0) {
    return {n == 1 ? 1.0 : 0.0, n == 0 ? 1.0 : 0.0, 0.0};
  }
  if (underflows(std::max(n - 1, 0), x)) return {0.0, 0.0, 0.0};
  if (x <= kSeriesLimit) {
    const double value = series(n, x);
    const double next = series(n + 1, x);
    const double prev = n == 0 ? -next : series(n - 1, x);
    return {prev, value, next};
  }
  if (x >= kHankelMinArgument && static_cast<double>(n + 1) * (n + 1) <= x) {
    double value = 0.0, next = 0.0;
    if (hankel(n, x, value) && hankel(n + 1, x, next)) {
      const double prev = n == 0 ? -next : 2.0 * n / x * value - next;
      return {prev, value, next};
    }
  }
  return miller(n, x);
}

// Guesses for neighbouring zeros; index 0 maps to the left end of the search range.
double guess_or_floor(int n, int k) {
  if (k <= 0) return n > 0 ? static_cast<double>(n) : 0.0;
  return bessel_zero_guess(n, k);
}

struct Sample {
  double value;
  double derivative;
};

Sample sample_for_search(int n, double x) {
  g_zero_search_evaluations.fetch_add(1, std::memory_order_relaxed);
  const BesselTriple t = triple_unchecked(n, x);
  return {t.value, 0.5 * (t.prev - t.next)};
}

}  // namespace

BesselTriple bessel_j_triple(int n, double x) {
  check_arguments(n, x);
  return triple_unchecked(n, x);
}

double bessel_j(int n, double x) { return bessel_j_triple(n, x).value; }

double bessel_j_prime(int n, double x) {
  const BesselTriple t = bessel_j_triple(n, x);
  return 0.5 * (t.prev - t.next);
}

double bessel_zero_guess(int n, int k) {
  if (k < 1) throw IndexError("bessel_zero: index is 1-based");
  const double mu = 4.0 * static_cast<double>(n) * n;
  const double beta = (k + 0.5 * n - 0.25) * std::numbers::pi;
  const auto mcmahon = [&] {
    const double b8 = 8.0 * beta;
    const double b8_2 = b8 * b8;
    return beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 * b8_2) -
           32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b8 * b8_2 * b8_2);
  };
  if (n == 0) return mcmahon();
  const double t = airy_zero(static_cast<std::size_t>(k)) / std::cbrt(static_cast<double>(n) * n);
  if (t > 100.0) return mcmahon();
  return n * olver_p0(t);
}

BesselZero bessel_zero(int n, int k) {
  if (k < 1) throw IndexError("bessel_zero: index is 1-based");
  if (n < 0 || n > kMaxOrder) throw DomainError("bessel_zero: order outside [0, 1e5]");

  const double g_prev = guess_or_floor(n, k - 1);
  const double g = bessel_zero_guess(n, k);
  const double g_next = bessel_zero_guess(n, k + 1);
  double a = (k == 1) ? g_prev : 0.5 * (g_prev + g);
  double b = 0.5 * (g + g_next);
  if (b > kMaxArgument) throw DomainError("bessel_zero: zero exceeds 1e5");

  double fa = sample_for_search(n, a).value;
  const double fb = sample_for_search(n, b).value;
  if (!(fa * fb < 0.0)) {
    std::ostringstream diag;
    diag.precision(17);
    diag << "n=" << n << " k=" << k << " bracket=[" << a << ", " << b << "] J=[" << fa << ", "
         << fb << "] guess=" << g;
    throw NumericalError("bessel_zero: initial bracket has no sign change", diag.str());
  }

  double x = std::clamp(g, a, b);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 0; iter < 50; ++iter) {
    const Sample s = sample_for_search(n, x);
    if (s.value == 0.0) return {n, k, x};
    if ((s.value < 0.0) == (fa < 0.0)) {
      a = x;
      fa = s.value;
    } else {
      b = x;
    }
    double next = x - s.value / s.derivative;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::fabs(next - x) <= 2.0 * eps * x || (b - a) <= 4.0 * eps * x) return {n, k, next};
    x = next;
  }
  std::ostringstream diag;
  diag.precision(17);
  diag << "n=" << n << " k=" << k << " last=" << x << " bracket=[" << a << ", " << b << "]";
  throw NumericalError("bessel_zero: no convergence after 50 iterations", diag.str());
}

std::vector<BesselZero> bessel_zeros_in_interval(int n, double lo, double hi) {
  if (!(lo >= 0.0) || !(lo < hi)) throw DomainError("bessel_zeros_in_interval: need 0 <= lo < hi");
  std::vector<BesselZero> out;
  if (hi <= n) return out;

  // Phase-count estimate of the number of zeros below lo.
  double count = 0.0;
  if (lo > n) {
    const double nn = n;
    count = (std::sqrt(lo * lo - nn * nn) - nn * std::acos(nn / lo)) / std::numbers::pi + 0.25;
  }
  int k = std::max(1, static_cast<int>(std::floor(count)));
  BesselZero z = bessel_zero(n, k);
  while (z.value >= lo && k > 1) {
    const BesselZero prev = bessel_zero(n, k - 1);
    if (prev.value < lo) break;
    z = prev;
    --k;
  }
  while (z.value < lo) z = bessel_zero(n, ++k);
  while (z.value <= hi) {
    out.push_back(z);
    z = bessel_zero(n, ++k);
  }
  return out;
}

std::size_t zero_search_evaluations() noexcept {
  return g_zero_search_evaluations.load(std::memory_order_relaxed);
}

}  // namespace caustica::specfun
