#pragma once

// Growth-collapse chain on {0, 1, ...}: from state n move to n + 1 with
// probability p_n, reset to 0 with probability q_n = w1 / (w + n^alpha)
// (0^alpha = 0, so q_0 = w1/w).

#include "harmonic/types.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>

namespace harmonic {

class ChainSpec {
 public:
  ChainSpec(Weights weights, double alpha);

  const Weights& weights() const noexcept { return weights_; }
  double alpha() const noexcept { return alpha_; }

  double q(std::size_t n) const;
  /// 1 - q_n evaluated as (w2 + n^alpha)/(w + n^alpha).
  double p(std::size_t n) const;

 private:
  Weights weights_;
  double alpha_;
};

enum class ChainClass {
  absorbing_certain_extinction,
  absorbing_possible_escape,
  transient,
  null_recurrent,
  positive_recurrent,
};

std::string to_string(ChainClass c);

/// w2 = 0: alpha <= 1 certain extinction, else escape possible.
/// w2 > 0: alpha > 1 transient, alpha < 1 positive recurrent, alpha = 1
/// positive recurrent iff w1 > 1.
ChainClass classify(const ChainSpec& spec);

/// Invariant probabilities pi_0..pi_{n_max} with deficit = sum_{n > n_max} pi_n.
/// alpha = 1: pi_n = pi_0 [w2]_n/[w]_n with pi_0 = (w1-1)/(w-1) and the
/// telescoped deficit pi_0 r_{N+1} (w+N)/(w1-1), r_n = [w2]_n/[w]_n.
/// alpha < 1: normalization of u_n = prod_{k<n} p_k summed to an adaptive cut
/// M with the certified remainder sum_{n>M} u_n <= u_M M / (beta (x_M - 1/beta + 1)),
/// beta = 1 - alpha, x_M = c M^beta / beta, c = w1/(w+1), until the
/// remainder is below 1e-15 of the total. Throws DomainError unless
/// positive recurrent, LimitExceeded if the cut would pass 10^8.
FinitePmf invariant_measure(const ChainSpec& spec, std::size_t n_max);

/// max_n |(pi P)_n - pi_n| over the stored window. The flow into 0 from
/// beyond the window is sum_{n>N} pi_n q_n = pi_{N+1} = pi_N p_N.
double stationarity_residual(const ChainSpec& spec, const FinitePmf& pi);

struct TruncatedMatrix {
  std::size_t n = 0;
  Eigen::MatrixXd entries;  ///< (n+1) x (n+1); column 0 holds q_i, superdiagonal p_i
};

TruncatedMatrix truncated_matrix(const ChainSpec& spec, std::size_t n);

/// P_{n0}(T_1(n) > l) = e_{n0}' P_(n)^l 1, by l structured matrix-vector
/// products (O(l n)). Also the extremal marginal P(N_l* <= n | N_0 = n0).
double overcrossing_tail(const ChainSpec& spec, std::size_t n0, std::size_t n, std::size_t l);

/// E_{n0}(T_1(n)) = e_{n0}' (I - P_(n))^-1 1, by back substitution
/// x_i = a_i + b_i x_0 exploiting the sparsity. Throws Infeasible when the
/// expectation is infinite (some p_i = 0).
double expected_overcrossing(const ChainSpec& spec, std::size_t n0, std::size_t n);

/// Same quantity through a dense LU solve of the truncated matrix.
double expected_overcrossing_dense(const ChainSpec& spec, std::size_t n0, std::size_t n);

/// Perron root of P_(n) by power iteration, stopped when the Collatz-Wielandt
/// bounds agree to relative 1e-10.
double spectral_radius(const ChainSpec& spec, std::size_t n);

struct ExtinctionPgf {
  /// E(z^tau; tau < inf), tau the hitting time of 0 from n.
  double value = 0.0;
  /// P(tau = inf) = prod_{m >= n} p_m.
  double escape_mass = 0.0;
  /// Bound on the neglected part of the series.
  double truncation_bound = 0.0;
  /// Bound on the absolute error of escape_mass.
  double escape_error = 0.0;
};

/// w2 = 0 chain started at n: E(z^tau) = sum_{m>=n} q_m z^(m-n+1) prod_{k=n}^{m-1} p_k
/// for z in [0, 1). n = 0 is absorbing (tau = 0).
ExtinctionPgf extinction_pgf(double w1, double alpha, std::size_t n, double z);

}  // namespace harmonic
