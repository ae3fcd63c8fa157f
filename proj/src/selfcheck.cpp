#include "caustica/selfcheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>

#include "caustica/specfun.hpp"

namespace caustica {
namespace {

namespace sf = specfun;

CheckResult check(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, value <= threshold};
}

// Fourth-order central second difference.
double airy_ode_residual(double x, double h = 1e-3) {
  const auto f = [](double t) { return sf::airy_ai(t); };
  const double d2 = (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
  return std::fabs(d2 - x * f(x));
}

double recurrence_residual(int n, double x) {
  const double a = sf::bessel_j(n - 1, x);
  const double b = sf::bessel_j(n, x);
  const double c = sf::bessel_j(n + 1, x);
  const double scale = std::max({std::fabs(a), std::fabs(c), std::fabs(2.0 * n / x * b)});
  if (scale < 1e-290) return 0.0;
  return std::fabs(a + c - 2.0 * n / x * b) / scale;
}

}  // namespace

std::vector<CheckResult> specfun_checks() {
  std::vector<CheckResult> out;
  out.push_back(check("first zero of J_0", std::fabs(sf::bessel_zero(0, 1).value - 2.40482555769577), 1e-10));
  out.push_back(check("first Airy zero", std::fabs(sf::airy_zero(1) - 2.33810741045977), 1e-10));
  out.push_back(check("Ai(0)", std::fabs(sf::airy_ai(0.0) - 0.35502805388781723926), 1e-12));
  out.push_back(check("Ai(10) decay", sf::airy_ai(10.0), 1e-9));

  double spot = 0.0;
  for (double x : {-5.0, 0.0, 5.0}) spot = std::max(spot, airy_ode_residual(x));
  out.push_back(check("Airy ODE residual at -5, 0, 5", spot, 1e-9));
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> airy_arg(-20.0, 5.0);
  double random_ode = 0.0;
  for (int i = 0; i < 200; ++i) random_ode = std::max(random_ode, airy_ode_residual(airy_arg(rng)));
  out.push_back(check("Airy ODE residual, 200 points on [-20, 5]", random_ode, 1e-8));

  double airy_zero_residual = 0.0;
  for (std::size_t k = 1; k <= 1000; ++k)
    airy_zero_residual = std::max(airy_zero_residual, std::fabs(sf::airy_ai(-sf::airy_zero(k))));
  out.push_back(check("|Ai(-a_k)|, k <= 1000", airy_zero_residual, 1e-12));

  const double j50 = sf::bessel_j(50, 60.0);
  out.push_back(check("recurrence at (50, 60), relative to J_50",
                      std::fabs(sf::bessel_j(49, 60.0) + sf::bessel_j(51, 60.0) - 100.0 / 60.0 * j50) / std::fabs(j50),
                      1e-9));
  std::mt19937_64 rng2(7);
  std::uniform_int_distribution<int> order(1, 1000);
  std::uniform_real_distribution<double> bessel_arg(0.0, 2000.0);
  double random_rec = 0.0;
  for (int i = 0; i < 500; ++i) {
    const int n = order(rng2);
    random_rec = std::max(random_rec, recurrence_residual(n, bessel_arg(rng2)));
  }
  out.push_back(check("recurrence, 500 random (n, x)", random_rec, 1e-9));

  double zero_residual = 0.0;
  for (int n : {0, 1, 7, 50, 200, 1000})
    for (int k : {1, 2, 10, 40}) zero_residual = std::max(zero_residual, std::fabs(sf::bessel_j(n, sf::bessel_zero(n, k).value)));
  out.push_back(check("|J_n(j_{n,k})|", zero_residual, 1e-12));

  const std::array<int, 5> orders{50, 100, 200, 400, 800};
  out.push_back(check("Olver slope, n = 50..800", sf::olver_fit(orders).slope, -0.9));
  return out;
}

void print_checks(const std::vector<CheckResult>& checks, std::ostream& out) {
  char line[160];
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-4s %-44s %13.6g <= %-9.3g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                  c.value, c.threshold);
    out << line;
  }
}

}  // namespace caustica
