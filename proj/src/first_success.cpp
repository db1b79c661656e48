#include "harmonic/first_success.hpp"

#include "harmonic/numkernel.hpp"

#include <cmath>

namespace harmonic::first_success {

double survival(const Weights& weights, std::size_t n) {
  if (n == 0) return 1.0;
  if (weights.w2() == 0.0) return 0.0;
  return std::exp(log_rising_ratio(weights.w2(), weights.w(), n));
}

double pmf(const Weights& weights, std::size_t k) {
  const double head = weights.w1() / weights.w();
  if (k == 0) return head;
  if (weights.w2() == 0.0) return 0.0;
  return head * std::exp(log_rising_ratio(weights.w2(), weights.w() + 1.0, k));
}

double pgf(const Weights& weights, double z) {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("first_success::pgf: z must lie in [0, 1]");
  if (weights.w2() == 0.0) return 1.0;
  return weights.w1() / weights.w() * gauss_f1(weights.w2(), weights.w() + 1.0, z);
}

double factorial_moment(const Weights& weights, std::size_t i) {
  if (i == 0) return 1.0;
  if (weights.w2() == 0.0) return 0.0;
  const double di = static_cast<double>(i);
  if (!(di < weights.w1())) {
    throw Infeasible("first_success::factorial_moment: moment of order >= w1 is infinite");
  }
  return std::exp(std::lgamma(di + 1.0) + log_rising_factorial(weights.w2(), i) -
                  log_rising_factorial(weights.w1() - di, i));
}

double mean(const Weights& weights) {
  if (weights.w2() == 0.0) return 0.0;
  if (!(weights.w1() > 1.0)) throw Infeasible("first_success::mean: infinite for w1 <= 1");
  return weights.w2() / (weights.w1() - 1.0);
}

double variance(const Weights& weights) {
  if (weights.w2() == 0.0) return 0.0;
  if (!(weights.w1() > 2.0)) throw Infeasible("first_success::variance: infinite for w1 <= 2");
  const double w1 = weights.w1();
  return w1 * (weights.w() - 1.0) * mean(weights) / ((w1 - 1.0) * (w1 - 2.0));
}

double atom_at_infinity(const Weights& weights, double p) {
  if (!(weights.w2() > 0.0)) throw DomainError("atom_at_infinity: requires w2 > 0");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("atom_at_infinity: p must lie in (0, 1)");
  const double series = gauss_f1(weights.w2(), weights.w(), p);
  return (1.0 - p) / p * (series - 1.0);
}

double atom_at_infinity_direct(const Weights& weights, double p) {
  if (!(weights.w2() > 0.0)) throw DomainError("atom_at_infinity_direct: requires w2 > 0");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("atom_at_infinity_direct: p must lie in (0, 1)");
  const double q = 1.0 - p;
  CompensatedSum acc;
  double surv = 1.0;
  double geo = q;  // q p^(n-1)
  for (std::size_t n = 1;; ++n) {
    const double dn = static_cast<double>(n);
    surv *= (weights.w2() + dn - 1.0) / (weights.w() + dn - 1.0);
    const double term = surv * geo;
    acc.add(term);
    // Survival is nonincreasing, so the remainder is below surv * p^n.
    if (surv * std::pow(p, dn) < 1e-15 * acc.value() || n >= 100'000'000) break;
    geo *= p;
  }
  return acc.value();
}

FirstSuccessLaw law(const Weights& weights, std::size_t k_max) {
  FirstSuccessLaw out{weights, k_max, {}, 0.0};
  out.probs.offset = 0;
  out.probs.probs.resize(static_cast<Eigen::Index>(k_max + 1));
  const double w1 = weights.w1();
  const double w2 = weights.w2();
  const double w = weights.w();
  double ratio = 1.0;  // [w2]_k/[w+1]_k
  for (std::size_t k = 0; k <= k_max; ++k) {
    const double dk = static_cast<double>(k);
    out.probs.probs[static_cast<Eigen::Index>(k)] = w1 / w * ratio;
    ratio *= (w2 + dk) / (w + 1.0 + dk);
  }
  out.deficit = survival(weights, k_max + 1);
  out.probs.deficit = out.deficit;
  sanitize(out.probs, false);
  return out;
}

}  // namespace harmonic::first_success
