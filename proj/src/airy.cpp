#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "caustica/errors.hpp"
#include "caustica/specfun.hpp"

namespace caustica::specfun {
namespace {

using ld = long double;

constexpr ld kAi0 = 0.355028053887817239260063186004183176L;
constexpr ld kAiPrime0 = -0.258819403792806798405183560189203963L;
constexpr ld kPi = 3.14159265358979323846264338327950288L;

// Anchors on [-kAnchorSpan, kAnchorSpan] every kAnchorStep; Taylor steps of
// at most kAnchorStep/2 from the nearest anchor. Outside the span the
// asymptotic series are accurate to well below double rounding.
constexpr ld kAnchorStep = 0.5L;
constexpr int kAnchorHalf = 20;
constexpr ld kAnchorSpan = kAnchorStep * kAnchorHalf;

std::atomic<double> g_airy_perturbation{0.0};

struct Pair {
  ld y;
  ld dy;
};

// Taylor expansion of the solution of y'' = x y through (x0, at) evaluated at x0 + t.
Pair taylor_step(ld x0, Pair at, ld t) {
  if (t == 0.0L) return at;
  ld cm1 = 0.0L;  // c_{k-1}
  ld c0 = at.y;   // c_k
  ld c1 = at.dy;  // c_{k+1}
  ld tk = 1.0L;   // t^k
  ld y = 0.0L;
  ld dy = 0.0L;
  for (int k = 0; k < 120; ++k) {
    const ld term = c0 * tk;
    y += term;
    if (k > 0) dy += k * c0 * tk / t;
    const ld c2 = (x0 * c0 + cm1) / ((k + 2.0L) * (k + 1.0L));
    cm1 = c0;
    c0 = c1;
    c1 = c2;
    tk *= t;
    const ld scale = std::fabs(y) + std::fabs(dy) + 1e-300L;
    if (k > 4 && std::fabs(c0 * tk) + std::fabs(c1 * tk * t) < 1e-24L * scale) break;
  }
  return {y, dy};
}

ld u_coeff_next(int k, ld prev) {
  return prev * ((6.0L * k - 5.0L) * (6.0L * k - 3.0L) * (6.0L * k - 1.0L)) /
         ((2.0L * k - 1.0L) * 216.0L * k);
}

Pair asymptotic_positive(ld x) {
  const ld root4 = std::sqrt(std::sqrt(x));
  const ld zeta = 2.0L / 3.0L * x * std::sqrt(x);
  ld su = 1.0L;
  ld sv = 1.0L;
  ld u = 1.0L;
  ld zk = 1.0L;
  ld last = 1.0L;
  for (int k = 1; k < 60; ++k) {
    u = u_coeff_next(k, u);
    const ld v = -(6.0L * k + 1.0L) / (6.0L * k - 1.0L) * u;
    zk /= -zeta;
    const ld term = u * zk;
    if (std::fabs(term) > last) break;
    su += term;
    sv += v * zk;
    last = std::fabs(term);
    if (last < 1e-22L) break;
  }
  const ld e = std::exp(-zeta) / (2.0L * std::sqrt(kPi));
  return {e / root4 * su, -root4 * e * sv};
}

// Ai(-z), Ai'(-z) for z > 0 large.
Pair asymptotic_negative(ld z) {
  const ld root4 = std::sqrt(std::sqrt(z));
  const ld zeta = 2.0L / 3.0L * z * std::sqrt(z);
  // P, Q from even/odd u_k; R, S from even/odd v_k.
  ld p = 1.0L, q = 0.0L, r = 1.0L, s = 0.0L;
  ld u = 1.0L;
  ld zk = 1.0L;
  ld last = 1.0L;
  for (int k = 1; k < 60; ++k) {
    u = u_coeff_next(k, u);
    const ld v = -(6.0L * k + 1.0L) / (6.0L * k - 1.0L) * u;
    zk /= zeta;
    const ld term = u * zk;
    if (std::fabs(term) > last) break;
    // (-1)^m with m = k/2 (even k) or (k-1)/2 (odd k)
    const ld sign = ((k / 2) % 2 == 0) ? 1.0L : -1.0L;
    if (k % 2 == 0) {
      p += sign * term;
      r += sign * v * zk;
    } else {
      q += sign * term;
      s += sign * v * zk;
    }
    last = std::fabs(term);
    if (last < 1e-22L) break;
  }
  const ld phase = zeta - kPi / 4.0L;
  const ld c = std::cos(phase);
  const ld sn = std::sin(phase);
  const ld inv_sqrt_pi = 1.0L / std::sqrt(kPi);
  return {inv_sqrt_pi / root4 * (c * p + sn * q), inv_sqrt_pi * root4 * (sn * r - c * s)};
}

struct AnchorTable {
  std::array<Pair, 2 * kAnchorHalf + 1> at{};

  AnchorTable() {
    at[kAnchorHalf] = {kAi0, kAiPrime0};
    // Oscillatory side: both solutions bounded, forward stepping is stable.
    for (int j = 1; j <= kAnchorHalf; ++j) {
      const ld x0 = -(j - 1) * kAnchorStep;
      at[kAnchorHalf - j] = taylor_step(x0, at[kAnchorHalf - j + 1], -kAnchorStep);
    }
    // Decaying side: Ai is dominant when stepping towards the origin.
    at[2 * kAnchorHalf] = asymptotic_positive(kAnchorSpan);
    for (int j = kAnchorHalf - 1; j >= 1; --j) {
      const ld x0 = (j + 1) * kAnchorStep;
      at[kAnchorHalf + j] = taylor_step(x0, at[kAnchorHalf + j + 1], -kAnchorStep);
    }
  }
};

const AnchorTable& anchors() {
  static const AnchorTable table;
  return table;
}

AiryValue airy_unperturbed(double x) {
  if (!std::isfinite(x)) throw DomainError("airy: non-finite argument");
  if (std::fabs(x) > 1e6) throw DomainError("airy: |x| > 1e6");
  const ld xl = x;
  Pair p{};
  if (xl > kAnchorSpan) {
    p = asymptotic_positive(xl);
  } else if (xl < -kAnchorSpan) {
    p = asymptotic_negative(-xl);
  } else {
    const long j = std::lround(xl / kAnchorStep);
    const ld x0 = j * kAnchorStep;
    p = taylor_step(x0, anchors().at[j + kAnchorHalf], xl - x0);
  }
  return {static_cast<double>(p.y), static_cast<double>(p.dy)};
}

}  // namespace

AiryValue airy(double x) {
  AiryValue v = airy_unperturbed(x);
  v.ai += g_airy_perturbation.load(std::memory_order_relaxed);
  return v;
}

double airy_ai(double x) { return airy(x).ai; }

double airy_ai_prime(double x) { return airy(x).ai_prime; }

double airy_zero(std::size_t k) {
  if (k == 0) throw IndexError("airy_zero: index is 1-based");
  if (k > 1000000) throw IndexError("airy_zero: k > 1e6");
  // Classical large-t expansion of the zeros, t = 3pi(4k-1)/8.
  const ld t = 3.0L * kPi * (4.0L * k - 1.0L) / 8.0L;
  const ld it2 = 1.0L / (t * t);
  ld a = std::cbrt(t * t) *
         (1.0L + it2 * (5.0L / 48.0L +
                        it2 * (-5.0L / 36.0L + it2 * (77125.0L / 82944.0L +
                                                      it2 * (-108056875.0L / 6967296.0L)))));
  double ad = static_cast<double>(a);
  for (int iter = 0; iter < 30; ++iter) {
    const AiryValue v = airy(-ad);
    const double step = v.ai / v.ai_prime;
    ad += step;
    if (std::fabs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * ad) break;
  }
  return ad;
}

AiryZeroTable::AiryZeroTable(std::size_t count) {
  zeros_.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) zeros_.push_back(airy_zero(k));
}

double AiryZeroTable::operator[](std::size_t k) const {
  if (k == 0 || k > zeros_.size())
    throw IndexError("AiryZeroTable: index " + std::to_string(k) + " outside [1, count]");
  return zeros_[k - 1];
}

namespace testing {
void set_airy_perturbation(double delta) noexcept {
  g_airy_perturbation.store(delta, std::memory_order_relaxed);
}
}  // namespace testing

}  // namespace caustica::specfun
