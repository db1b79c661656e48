#pragma once

// The (w1, w2)-Sibuya family: law of K_1 = K_1+ - 1, the number of failures
// before the first success.
//
//   P(K_1+ > n) = [w2]_n / [w]_n,   P(K_1 = k) = (w1/w) [w2]_k / [w+1]_k.
//
// w = 1 is the bare Sibuya law, w2 = 1 the Yule-Simon law. w2 = 0 (Ewens
// case) degenerates to the point mass K_1 = 0 and is handled explicitly.

#include "harmonic/types.hpp"

#include <cstddef>

namespace harmonic::first_success {

/// P(K_1+ > n) = [w2]_n/[w]_n, in log space; exactly 0 for w2 = 0, n >= 1.
double survival(const Weights& weights, std::size_t n);

/// P(K_1 = k).
double pmf(const Weights& weights, std::size_t k);

/// E(z^K_1) = (w1/w) F(1, w2; w+1; z), z in [0, 1].
double pgf(const Weights& weights, double z);

/// E[(K_1)_i] = i! [w2]_i / [w1 - i]_i. Throws Infeasible when i >= w1
/// (the moment is infinite) unless w2 = 0.
double factorial_moment(const Weights& weights, std::size_t i);

/// E(K_1) = w2/(w1 - 1), requires w1 > 1.
double mean(const Weights& weights);

/// Var(K_1) = w1 (w - 1) E(K_1) / ((w1 - 1)(w1 - 2)), requires w1 > 2.
double variance(const Weights& weights);

/// Mass at infinity of K_1+ observed through an independent geometric
/// window N with P(N = n) = (1-p) p^(n-1):
/// P(K_1+ > N) = ((1-p)/p) (F(1, w2; w; p) - 1). Requires w2 > 0, p in (0, 1).
double atom_at_infinity(const Weights& weights, double p);

/// Same quantity as a direct sum of survival(n) (1-p) p^(n-1), truncated with
/// a geometric tail bound below 1e-15.
double atom_at_infinity_direct(const Weights& weights, double p);

struct FirstSuccessLaw {
  Weights weights;
  std::size_t k_max = 0;
  /// P(K_1 = k), k = 0..k_max; probs.deficit = P(K_1 > k_max).
  FinitePmf probs;
  double deficit = 0.0;
};

/// Tabulated law on {0..k_max}; deficit = [w2]_{k_max+1}/[w]_{k_max+1}.
FirstSuccessLaw law(const Weights& weights, std::size_t k_max);

}  // namespace harmonic::first_success
