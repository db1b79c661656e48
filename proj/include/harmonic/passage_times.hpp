#pragma once

// Laws of the l-th success time K_l+, the excess time K_l = K_l+ - l and the
// gaps L_l+ = K_l+ - K_{l-1}+ for the alpha = 0 model.
//
// Gap laws are computed by conditioning on the previous success time:
//   P(L_l+ = i) = sum_n P(K_{l-1}+ = n) prod_{m=n+1}^{n+i-1} (w2+m-1)/(w+m-1)
//                 * w1/(w+n+i-1),
// i.e. i-1 failures followed by a success. Every truncated sum carries a
// certified error bound; heavy tails (small w1) may make a tolerance
// unreachable, which is reported rather than thrown.

#include "harmonic/numkernel.hpp"
#include "harmonic/types.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace harmonic {

/// P_{n,l} = P(K_l+ = n) for 1 <= l <= l_max, 1 <= n <= n_max.
class TriangularTable {
 public:
  TriangularTable(Eigen::MatrixXd entries, Eigen::VectorXd deficits);

  std::size_t n_max() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t l_max() const noexcept { return static_cast<std::size_t>(entries_.cols()); }

  /// P(K_l+ = n); 0 for n < l. Throws std::out_of_range outside the table.
  double at(std::size_t n, std::size_t l) const;
  /// P(K_l+ > n_max), computed from the success-count law, not by subtraction.
  double deficit(std::size_t l) const;
  /// Column l as a pmf on {1..n_max} with its deficit.
  FinitePmf column(std::size_t l) const;

  const Eigen::MatrixXd& entries() const noexcept { return entries_; }

 private:
  Eigen::MatrixXd entries_;  // (n-1, l-1)
  Eigen::VectorXd deficits_;
};

/// Fills the table column by column with the three-term recursion
/// P(K_{l+1}+ = n+1) = w1/(w+n) P(K_l+ = n) + (w2+n-1)/(w+n) P(K_{l+1}+ = n),
/// first column P(K_1+ = n) = w1/(w+n-1) [w2]_{n-1}/[w]_{n-1}.
/// With w2 = 0 the first column is the point mass at 1.
TriangularTable passage_table(const Weights& weights, std::size_t l_max, std::size_t n_max);

/// Ewens case w2 = 0: P(K_l+ = n) = w1^(l-1) |s(n-1, l-1)| / [w1+1]_{n-1}.
double passage_pmf_ewens(double w1, std::size_t l, std::size_t n);
double passage_pmf_ewens(double w1, std::size_t l, std::size_t n, const StirlingTable& table);

/// Law of K_l = K_l+ - l on {0..n_max-l}, computed with the excess-time
/// recursion P(K_{l+1} = j) = w1/(w+j+l) P(K_l = j)
///                          + (w2+j+l-1)/(w+j+l) P(K_{l+1} = j-1).
/// deficit = P(K_l+ > n_max).
FinitePmf excess_pmf(const Weights& weights, std::size_t l, std::size_t n_max);

struct GapOptions {
  /// Summation cut on the previous success time; 0 picks the smallest
  /// power-of-two horizon meeting `tolerance` (up to horizon_cap).
  std::size_t horizon = 0;
  double tolerance = 1e-10;
  std::size_t horizon_cap = std::size_t{1} << 25;
};

struct GapLaw {
  std::size_t l = 0;
  std::size_t horizon = 0;
  /// P(L_l+ = i) on {1..i_max}. Entries are lower bounds; `deficit` is the
  /// mass outside the table (P(L > i_max) plus the horizon cut).
  FinitePmf pmf;
  /// P(K_{l-1}+ > horizon): mass never summed over.
  double horizon_mass = 0.0;
  /// Upper bound on the error of every pmf entry.
  double pmf_error = 0.0;
  /// tail_errors[i] bounds the error of tail(i), i = 0..i_max.
  Eigen::VectorXd tail_errors;
  /// Whether max(pmf_error, tail_errors) <= tolerance.
  bool certified = false;

  /// P(L_l+ > i) = 1 - sum_{j<=i} P(L_l+ = j).
  double tail(std::size_t i) const;
};

/// Gap law for l >= 2 (the gap after the (l-1)-th success).
GapLaw gap_pmf(const Weights& weights, std::size_t l, std::size_t i_max, GapOptions options = {});

/// Records case (w1, w2) = (1, 0): sum_{k<=i} (-1)^k C(i, k) (1+k)^-l,
/// evaluated in exact rationals. Equals P(L_{l+1}+ > i), the gap after the
/// l-th success.
double gap_tail_neuts(std::size_t l, std::size_t i);

/// P(K_{l+1}+ - m > n | K_l+ = m) = [w2+m]_n / [w+m]_n, m >= 1.
double conditional_gap_tail(const Weights& weights, std::size_t m, std::size_t n);

struct TailAsymptote {
  double index = 0.0;      ///< tail index, always w1
  double prefactor = 0.0;  ///< Gamma(w+m)/Gamma(w2+m)
};

/// Power-law tail of the conditional gap: c_m n^-w1 with c_m = Gamma(w+m)/Gamma(w2+m).
/// Requires w2 > 0 or m >= 1.
TailAsymptote tail_asymptote(const Weights& weights, std::size_t m);

}  // namespace harmonic
