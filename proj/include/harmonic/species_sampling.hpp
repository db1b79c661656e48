#pragma once

// Joint laws of the generalized species-sampling model. Each draw either hits
// the reservoir (a "fictitious species" whose hits are the failures), an
// existing species, or a new species. Species counts are listed in order of
// appearance; that size-biased order is part of the law, so the parts are
// not exchangeable.

#include "harmonic/numkernel.hpp"
#include "harmonic/types.hpp"

#include <cstddef>
#include <vector>

namespace harmonic {

struct SampleConfiguration {
  std::size_t n0 = 0;              ///< reservoir hits
  std::vector<std::size_t> parts;  ///< species counts in order of appearance, all >= 1

  std::size_t n() const noexcept;
  std::size_t k() const noexcept { return parts.size(); }
};

/// n! ([w1|alpha]_k / [w]_n) ([w2]_{n0} / n0!) prod_l [1-alpha]_{n_l-1} / ((n_l-1)! sum_{j>=l} n_j).
/// Zero (not an error) when alpha = 1 and a part exceeds 1, or w2 = 0 and n0 > 0.
double dtg_joint(const AlphaModel& model, const SampleConfiguration& cfg);

/// Two-parameter form (w2 = 0, n0 = 0):
/// n! [w1|alpha]_k / [w1]_n prod_l [1-alpha]_{n_l-1} / ((n_l-1)! sum_{j>=l} n_j).
double dtg_two_param(double alpha, double w1, const std::vector<std::size_t>& parts);

/// alpha = 0 form: n! w1^k / [w1]_n prod_l 1 / sum_{j>=l} n_j.
double dtg_alpha_zero(double w1, const std::vector<std::size_t>& parts);

/// P(N_n(0) = n0, S_n = k) = C(n, n0) [w2]_{n0} [w1|alpha]_k S(n-n0, k; -1, -alpha, 0) / [w]_n,
/// evaluated exactly in rationals. alpha = 0 uses |s(n-n0, k)| (n - n0 <= 500);
/// alpha > 0 the Dobinski sum (n - n0 <= limit). Throws LimitExceeded beyond.
double reservoir_success_joint(const AlphaModel& model, std::size_t n, std::size_t n0, std::size_t k,
                               std::size_t limit = kDobinskiExactLimit);

/// Beta-binomial: C(n, n0) [w2]_{n0} [w1]_{n-n0} / [w]_n.
double reservoir_marginal(const Weights& weights, std::size_t n, std::size_t n0);

/// P(K_1+ = n) = w1 [w2]_{n-1} / [w]_n; the same for every alpha.
double first_success_time_alpha(const AlphaModel& model, std::size_t n);

/// Every configuration with n draws: n0 = 0..n and each composition of n - n0.
std::vector<SampleConfiguration> enumerate_configurations(std::size_t n);

}  // namespace harmonic
