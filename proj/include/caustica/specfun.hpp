#pragma once

// Airy and Bessel functions of integer order, their zeros, and the leading
// term of Olver's uniform expansion for the zeros of J_n.
//
// Conventions: Airy zeros are stored as positive magnitudes a_k with
// Ai(-a_k) = 0; zero indices k are 1-based.

#include <cstddef>
#include <span>
#include <vector>

namespace caustica::specfun {

struct AiryValue {
  double ai;
  double ai_prime;
};

/// Ai and Ai' together. |x| <= 1e6; non-finite input throws DomainError.
AiryValue airy(double x);
double airy_ai(double x);
double airy_ai_prime(double x);

/// k-th zero magnitude a_k of Ai, 1 <= k <= 1e6.
double airy_zero(std::size_t k);

/// The first `count` Airy zero magnitudes, computed once.
class AiryZeroTable {
 public:
  explicit AiryZeroTable(std::size_t count);

  std::size_t count() const noexcept { return zeros_.size(); }
  std::span<const double> zeros() const noexcept { return zeros_; }
  /// 1-based access.
  double operator[](std::size_t k) const;

 private:
  std::vector<double> zeros_;
};

/// J_n(x) for 0 <= n <= 1e5, 0 <= x <= 1e5.
double bessel_j(int n, double x);
double bessel_j_prime(int n, double x);

/// J_{n-1}(x), J_n(x), J_{n+1}(x) from a single evaluation.
struct BesselTriple {
  double prev;
  double value;
  double next;
};
BesselTriple bessel_j_triple(int n, double x);

struct BesselZero {
  int n = 0;
  int k = 0;
  double value = 0.0;
};

/// k-th positive zero of J_n (k >= 1).
BesselZero bessel_zero(int n, int k);

/// All zeros of J_n in the closed interval [lo, hi], ascending.
std::vector<BesselZero> bessel_zeros_in_interval(int n, double lo, double hi);

/// Leading-order initial guess used by bessel_zero (exposed for tests).
double bessel_zero_guess(int n, int k);

/// p0(t) = z >= 1 solving sqrt(z^2-1) - arccos(1/z) = (2/3) t^{3/2}, 0 <= t <= 100.
double olver_p0(double t);
/// F(t) = p0(t) - 1.
double olver_F(double t);

/// max_k |j_{n,k} - n p0(a_k / n^{2/3})| over a_k / n^{2/3} <= t_max, for
/// each order, and the least-squares slope of its logarithm against log n.
struct OlverFit {
  std::vector<int> orders;
  std::vector<double> worst;
  double t_max = 0.0;
  double slope = 0.0;
  /// max over orders of n * worst(n).
  double constant = 0.0;
};
OlverFit olver_fit(std::span<const int> orders, double t_max = 2.0);

/// Number of J_n evaluations performed by zero finding since process start
/// (all threads). Used to verify that cached sweeps skip root finding.
std::size_t zero_search_evaluations() noexcept;

namespace testing {
/// Adds `delta` to every airy_ai result. Fault injection only; 0 disables.
void set_airy_perturbation(double delta) noexcept;
}  // namespace testing

}  // namespace caustica::specfun
