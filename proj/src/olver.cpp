#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "caustica/errors.hpp"
#include "caustica/specfun.hpp"

namespace caustica::specfun {
namespace {

// tan(th) - th without cancellation for small th.
double tan_minus_identity(double th) {
  if (th < 0.1) {
    const double t2 = th * th;
    // Maclaurin coefficients of tan beyond the linear term.
    constexpr double c[] = {1.0 / 3.0,
                            2.0 / 15.0,
                            17.0 / 315.0,
                            62.0 / 2835.0,
                            1382.0 / 155925.0,
                            21844.0 / 6081075.0,
                            929569.0 / 638512875.0,
                            6404582.0 / 10854718875.0};
    double sum = 0.0;
    for (int i = 7; i >= 0; --i) sum = sum * t2 + c[i];
    return sum * t2 * th;
  }
  return std::tan(th) - th;
}

}  // namespace

double olver_p0(double t) {
  if (!std::isfinite(t) || t < 0.0 || t > 100.0) throw DomainError("olver_p0: t outside [0, 100]");
  if (t == 0.0) return 1.0;
  // With z = sec(th) the defining relation reads tan(th) - th = (2/3) t^{3/2}.
  const double c = 2.0 / 3.0 * t * std::sqrt(t);
  // Both candidates bound the root from above; Newton on the convex
  // increasing map then decreases monotonically to it.
  double th = std::min(std::cbrt(3.0 * c), std::atan(c + 0.5 * std::numbers::pi));
  for (int iter = 0; iter < 100; ++iter) {
    const double tn = std::tan(th);
    const double step = (tan_minus_identity(th) - c) / (tn * tn);
    double next = th - step;
    if (!(next > 0.0)) next = 0.5 * th;
    if (next >= th || std::fabs(next - th) <= 4e-16 * th) return 1.0 / std::cos(std::min(next, th));
    th = next;
  }
  std::ostringstream diag;
  diag.precision(17);
  diag << "t=" << t << " theta=" << th;
  throw NumericalError("olver_p0: no convergence", diag.str());
}

double olver_F(double t) { return olver_p0(t) - 1.0; }

OlverFit olver_fit(std::span<const int> orders, double t_max) {
  if (orders.size() < 2) throw DomainError("olver_fit: need at least two orders");
  if (!(t_max > 0.0 && t_max <= 100.0)) throw DomainError("olver_fit: t_max outside (0, 100]");
  OlverFit fit;
  fit.t_max = t_max;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int n : orders) {
    if (n < 1) throw DomainError("olver_fit: orders must be positive");
    const double n23 = std::cbrt(static_cast<double>(n) * n);
    double worst = 0.0;
    for (std::size_t k = 1;; ++k) {
      const double t = airy_zero(k) / n23;
      if (t > t_max) break;
      worst = std::max(worst, std::fabs(bessel_zero(n, static_cast<int>(k)).value - n * olver_p0(t)));
    }
    fit.orders.push_back(n);
    fit.worst.push_back(worst);
    fit.constant = std::max(fit.constant, worst * n);
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(worst);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(orders.size());
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return fit;
}

}  // namespace caustica::specfun
