#pragma once

// Law of the success count S_n.
//
// Three independent routes to the same pmf are provided: the forward
// recursion (canonical), the Stirling-number closed form with exact integer
// coefficients, and the generalized-Stirling / Dobinski forms. Tests hold
// them against each other and against exhaustive enumeration.

#include "harmonic/numkernel.hpp"
#include "harmonic/types.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace harmonic {

/// pi_n(k) = P(S_n = k), k = 0..n, by forward recursion from pi_0 = delta_0.
/// Handles alpha > 0 through the state-dependent success probability.
FinitePmf pmf_successes(const AlphaModel& model, std::size_t n);

/// pi_n(k) = (w1^k / [w]_n) sum_{l>=k} C(l, k) |s(n, l)| w2^(l-k), in log space.
FinitePmf pmf_successes_closed_form(const Weights& weights, std::size_t n);
FinitePmf pmf_successes_closed_form(const Weights& weights, std::size_t n,
                                    const StirlingTable& table);

/// pi_n(k) = w1^k s_{w2}(n, k) / [w]_n with generalized Stirling numbers.
FinitePmf pmf_successes_generalized_stirling(const Weights& weights, std::size_t n);

/// pi_n(k) = [w1 | alpha]_k S(n, k; -1, -alpha, w2) / [w]_n, evaluated exactly
/// in rationals and rounded once. Requires alpha > 0 and n <= limit.
FinitePmf pmf_successes_dobinski(const AlphaModel& model, std::size_t n,
                                 std::size_t limit = kDobinskiExactLimit);

/// f_n(z) = prod_{m<n} (w1 z + w2 + m) / (w + m).
double pgf_eval(const Weights& weights, std::size_t n, double z);

/// E[(S_n)_l] = (w1^l / [w]_n) sum_{k>=l} (k)_l |s(n, k)| w^(k-l); 0 for l > n.
double factorial_moments(const Weights& weights, std::size_t n, std::size_t l);
double factorial_moments(const Weights& weights, std::size_t n, std::size_t l,
                         const StirlingTable& table);

struct MeanVariance {
  double mean = 0.0;
  double variance = 0.0;
};

/// mu_n = w1 sum 1/(w+m), sigma_n^2 = w1 sum (w2+m)/(w+m)^2. Only alpha = 0;
/// throws DomainError otherwise (use the pmf for alpha > 0).
MeanVariance mean_variance(const AlphaModel& model, std::size_t n);

/// E(S_n) for any alpha, from E S_{m+1} = E S_m (1 + alpha/(w+m)) + w1/(w+m).
double mean_successes(const AlphaModel& model, std::size_t n);

/// Power model with independent trials, P(I_m = 1) = w1/(w + (m-1)^a), 0^a = 0:
/// E(S_n) = sum_{m<n} w1/(w + m^a).
double power_model_mean(const Weights& weights, double a, std::size_t n);

struct SeriesValue {
  double value = 0.0;
  double error_bound = 0.0;
};

/// lim E(S_n) = sum_{m>=0} w1/(w + m^a) for a > 1; the terms beyond the cut
/// are bracketed by integrals and the midpoint is returned.
SeriesValue power_model_mean_limit(const Weights& weights, double a);

/// mu_n - sigma_n^2 = w1^2 sum_{m<n} 1/(w+m)^2, summed directly.
double mean_variance_gap(const Weights& weights, std::size_t n);

struct PoissonBoundReport {
  double mu_n = 0.0;
  double sigma2_n = 0.0;
  double tv_exact = 0.0;
  double tv_lower = 0.0;
  double tv_upper = 0.0;
  /// Poisson support is summed over k < cutoff; the neglected upper tail
  /// is below 1e-13 by the Chernoff bound.
  std::size_t cutoff = 0;
};

/// Exact total-variation distance between S_n and Poisson(mu_n) together
/// with the two-sided bound (1/32) min(1, 1/mu)(mu - sigma^2) <= d_TV <=
/// (1 - e^-mu)(mu - sigma^2)/mu. Requires n >= 1.
PoissonBoundReport poisson_bounds(const Weights& weights, std::size_t n);

/// Law of a geometric window N, P(N = n) = p (1-p)^(n-1), truncated where
/// the remaining mass (1-p)^N_max drops below tol (recorded as deficit).
FinitePmf geometric_window_law(double p, double tol = 1e-13);

/// Law of S_N for a random window N independent of the trials.
FinitePmf mix_over_window(const AlphaModel& model, const FinitePmf& window_law);

/// Transition matrix Pi_n restricted to states 0..states-1 (alpha = 0):
/// stay with (w2 + n)/(w + n), step up with w1/(w + n). The last row drops
/// its step-up entry.
Eigen::MatrixXd success_step_matrix(const Weights& weights, std::size_t n, std::size_t states);

}  // namespace harmonic
