#pragma once

// Special functions and exact combinatorial tables shared by every module.
//
// Exact arithmetic uses Boost.Multiprecision. Every finite double is a dyadic
// rational, so routines advertised as exact convert their floating inputs
// without rounding and only round once, on output.

#include "harmonic/types.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <vector>

namespace harmonic {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::size_t kDefaultStirlingLimit = 500;
inline constexpr std::size_t kGeneralizedStirlingLimit = 170;
inline constexpr std::size_t kDobinskiExactLimit = 60;

// ---------------------------------------------------------------------------
// Factorials

/// Rising factorial [z]_n = z (z + 1) ... (z + n - 1); [z]_0 = 1. Works for
/// any scalar with +, * (double, Rational, BigInt).
template <class Scalar>
Scalar rising_factorial(const Scalar& z, std::size_t n) {
  Scalar acc(1);
  Scalar term(z);
  for (std::size_t i = 0; i < n; ++i) {
    acc *= term;
    term += Scalar(1);
  }
  return acc;
}

/// Falling factorial (x)_n = x (x - 1) ... (x - n + 1); (x)_0 = 1.
template <class Scalar>
Scalar falling_factorial(const Scalar& x, std::size_t n) {
  Scalar acc(1);
  Scalar term(x);
  for (std::size_t i = 0; i < n; ++i) {
    acc *= term;
    term -= Scalar(1);
  }
  return acc;
}

/// log [z]_n for z > 0. Throws DomainError for z <= 0.
double log_rising_factorial(double z, std::size_t n);

/// log([a]_n / [b]_n) for a, b > 0, summed termwise as log1p for moderate n
/// so that ratios close to 1 keep full relative accuracy.
double log_rising_ratio(double a, double b, std::size_t n);

/// log of the generalized rising factorial [x | step]_k = prod_{i<k}(x + i step).
/// Returns -inf when a factor is zero; throws DomainError on a negative factor.
double log_generalized_rising(double x, double step, std::size_t k);

double log_binomial(std::size_t n, std::size_t k);

// ---------------------------------------------------------------------------
// Digamma

/// Psi(x) for x > 0: upward recurrence to x >= 8, then the asymptotic
/// Bernoulli expansion through the x^-16 term (absolute error < 1e-15 there).
template <std::floating_point Real>
Real digamma(Real x) {
  if (!(x > Real(0)) || !std::isfinite(x)) {
    throw DomainError("digamma: argument must be positive and finite");
  }
  Real shift(0);
  while (x < Real(8)) {
    shift -= Real(1) / x;
    x += Real(1);
  }
  const Real inv = Real(1) / x;
  const Real t = inv * inv;
  // B_{2j} / (2j) for j = 1..8, signs folded into the nesting.
  const Real tail =
      t * (Real(1) / 12 -
           t * (Real(1) / 120 -
                t * (Real(1) / 252 -
                     t * (Real(1) / 240 -
                          t * (Real(1) / 132 -
                               t * (Real(691) / 32760 -
                                    t * (Real(1) / 12 - t * Real(3617) / 8160)))))));
  return shift + std::log(x) - Real(0.5) * inv - tail;
}

/// Psi(x + n) - Psi(x) = sum_{m<n} 1/(x + m), x > 0.
double digamma_difference(double x, double n);

// ---------------------------------------------------------------------------
// Exact-arithmetic helpers

/// The exact rational value of a finite double.
Rational exact_rational(double x);

/// Correctly scaled conversion that does not overflow for huge numerators
/// and denominators whose ratio is representable.
double to_double(const Rational& r);

/// log |v|; -inf for zero.
double log_abs(const BigInt& v);

// ---------------------------------------------------------------------------
// Stirling numbers of the first kind

/// Triangular table of |s(n, k)| for 0 <= k <= min(n, k_max), n <= n_max.
class StirlingTable {
 public:
  StirlingTable(std::size_t n_max, std::size_t k_max);

  std::size_t n_max() const noexcept { return n_max_; }
  std::size_t k_max() const noexcept { return k_max_; }

  /// |s(n, k)|; zero for k > n. Throws std::out_of_range outside the table.
  const BigInt& at(std::size_t n, std::size_t k) const;
  /// log |s(n, k)|, -inf when zero.
  double log_at(std::size_t n, std::size_t k) const;

 private:
  std::size_t n_max_;
  std::size_t k_max_;
  std::vector<std::vector<BigInt>> rows_;
  std::vector<std::vector<double>> logs_;
  static const BigInt zero_;
};

struct StirlingOptions {
  std::size_t limit = kDefaultStirlingLimit;  ///< largest admissible n_max
  std::size_t k_max = std::numeric_limits<std::size_t>::max();  ///< column cap
};

/// Exact |s(n, k)| via |s(n+1, k)| = n |s(n, k)| + |s(n, k-1)|.
/// Throws LimitExceeded when n_max > options.limit.
StirlingTable stirling_first_unsigned(std::size_t n_max, StirlingOptions options = {});

/// s_r(n, k) with s_r(n+1, k) = s_r(n, k-1) + (n + r) s_r(n, k), s_r(0,0) = 1.
struct GeneralizedStirlingTable {
  std::size_t n_max = 0;
  double r = 0.0;
  Eigen::MatrixXd entries;  ///< (n_max + 1) x (n_max + 1), lower triangular

  double at(std::size_t n, std::size_t k) const {
    return k > n ? 0.0 : entries(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  }
};

GeneralizedStirlingTable generalized_stirling(std::size_t n_max, double r,
                                              std::size_t limit = kGeneralizedStirlingLimit);

// ---------------------------------------------------------------------------
// Dobinski-type sum

/// S(n, k; -1, -alpha, w2) for k = 0..n, exactly:
/// (alpha^-k / k!) sum_{l<=k} (-1)^l C(k, l) [w2 - l alpha]_n.
/// Requires alpha != 0; throws LimitExceeded for n > limit.
std::vector<Rational> dobinski_row_exact(std::size_t n, double alpha, double w2,
                                         std::size_t limit = kDobinskiExactLimit);

/// Single entry of dobinski_row_exact rounded to double. Returns 0 for k > n.
double dobinski_generalized(std::size_t n, std::size_t k, double alpha, double w2);

struct CompensatedValue {
  double value = 0.0;
  /// sum |terms| / |sum terms|; values far above 1/eps mean no correct digits.
  double condition = 1.0;
};

/// Floating evaluation of the same alternating sum with Neumaier summation.
CompensatedValue dobinski_generalized_compensated(std::size_t n, std::size_t k, double alpha,
                                                  double w2);

// ---------------------------------------------------------------------------
// Gauss hypergeometric series with a = 1

/// F(1, b; c; z) = sum_n [b]_n / [c]_n z^n for z in [0, 1], c > 0.
/// At z = 1 returns the Gauss value (c - 1)/(c - 1 - b), which requires
/// c - 1 - b > 0 (else NonConvergence). Series truncated once the geometric
/// tail bound falls below 1e-14 relative; at most 10^6 terms.
double gauss_f1(double b, double c, double z);

/// Partial sums of the same series, for monotonicity checks.
std::vector<double> gauss_f1_partial_sums(double b, double c, double z, std::size_t terms);

// ---------------------------------------------------------------------------
// Summation helpers

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// log(sum exp(x_i)) ignoring -inf entries; -inf for an empty/all -inf input.
double log_sum_exp(const std::vector<double>& xs);

}  // namespace harmonic
