#include "harmonic/species_sampling.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace harmonic {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_factorial(std::size_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// sum_l [ log [1-alpha]_{n_l-1} - log (n_l-1)! - log sum_{j>=l} n_j ]
double log_part_product(double alpha, const std::vector<std::size_t>& parts) {
  double acc = 0.0;
  std::size_t suffix = std::accumulate(parts.begin(), parts.end(), std::size_t{0});
  for (std::size_t part : parts) {
    if (part == 0) throw DomainError("dtg: parts must be positive");
    const double rising = log_generalized_rising(1.0 - alpha, 1.0, part - 1);
    if (rising == kNegInf) return kNegInf;
    acc += rising - log_factorial(part - 1) - std::log(static_cast<double>(suffix));
    suffix -= part;
  }
  return acc;
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("dtg: alpha must lie in [0, 1]");
}

}  // namespace

std::size_t SampleConfiguration::n() const noexcept {
  return std::accumulate(parts.begin(), parts.end(), n0);
}

double dtg_joint(const AlphaModel& model, const SampleConfiguration& cfg) {
  const double alpha = model.alpha();
  const Weights& wt = model.weights();
  const std::size_t n = cfg.n();
  const std::size_t k = cfg.k();
  if (cfg.n0 > 0 && wt.w2() == 0.0) return 0.0;
  const double parts = log_part_product(alpha, cfg.parts);
  if (parts == kNegInf) return 0.0;
  double log_p = log_factorial(n) + log_generalized_rising(wt.w1(), alpha, k) - log_rising_factorial(wt.w(), n);
  if (cfg.n0 > 0) log_p += log_rising_factorial(wt.w2(), cfg.n0) - log_factorial(cfg.n0);
  return std::exp(log_p + parts);
}

double dtg_two_param(double alpha, double w1, const std::vector<std::size_t>& parts) {
  check_alpha(alpha);
  if (!(w1 > 0.0)) throw DomainError("dtg_two_param: w1 must be positive");
  const double prod = log_part_product(alpha, parts);
  if (prod == kNegInf) return 0.0;
  const std::size_t n = std::accumulate(parts.begin(), parts.end(), std::size_t{0});
  return std::exp(log_factorial(n) + log_generalized_rising(w1, alpha, parts.size()) -
                  log_rising_factorial(w1, n) + prod);
}

double dtg_alpha_zero(double w1, const std::vector<std::size_t>& parts) {
  if (!(w1 > 0.0)) throw DomainError("dtg_alpha_zero: w1 must be positive");
  std::size_t suffix = std::accumulate(parts.begin(), parts.end(), std::size_t{0});
  const std::size_t n = suffix;
  double log_p = log_factorial(n) + static_cast<double>(parts.size()) * std::log(w1) - log_rising_factorial(w1, n);
  for (std::size_t part : parts) {
    if (part == 0) throw DomainError("dtg: parts must be positive");
    log_p -= std::log(static_cast<double>(suffix));
    suffix -= part;
  }
  return std::exp(log_p);
}

double reservoir_success_joint(const AlphaModel& model, std::size_t n, std::size_t n0, std::size_t k,
                               std::size_t limit) {
  if (n0 > n) throw DomainError("reservoir_success_joint: need n0 <= n");
  const std::size_t m = n - n0;
  if (k > m) return 0.0;
  const Weights& wt = model.weights();
  if (n0 > 0 && wt.w2() == 0.0) return 0.0;

  const Rational w1 = exact_rational(wt.w1());
  const Rational w2 = exact_rational(wt.w2());
  const Rational alpha = exact_rational(model.alpha());

  Rational stirling;
  if (model.alpha() == 0.0) {
    stirling = Rational(stirling_first_unsigned(m).at(m, k));
  } else {
    stirling = dobinski_row_exact(m, model.alpha(), 0.0, limit)[k];
  }
  Rational prefix(1);  // [w1|alpha]_k
  for (std::size_t i = 0; i < k; ++i) prefix *= w1 + alpha * static_cast<long long>(i);

  BigInt binom(1);
  for (std::size_t i = 1; i <= n0; ++i) binom = binom * static_cast<long long>(n - n0 + i) / static_cast<long long>(i);

  const Rational value = Rational(binom) * rising_factorial(w2, n0) * prefix * stirling / rising_factorial(Rational(w1 + w2), n);
  return to_double(value);
}

double reservoir_marginal(const Weights& weights, std::size_t n, std::size_t n0) {
  if (n0 > n) throw DomainError("reservoir_marginal: need n0 <= n");
  if (n0 > 0 && weights.w2() == 0.0) return 0.0;
  double log_p = log_binomial(n, n0) + log_rising_factorial(weights.w1(), n - n0) -
                 log_rising_factorial(weights.w(), n);
  if (n0 > 0) log_p += log_rising_factorial(weights.w2(), n0);
  return std::exp(log_p);
}

double first_success_time_alpha(const AlphaModel& model, std::size_t n) {
  if (n == 0) return 0.0;
  const Weights& wt = model.weights();
  if (n > 1 && wt.w2() == 0.0) return 0.0;
  const double survival = n == 1 ? 1.0 : std::exp(log_rising_ratio(wt.w2(), wt.w(), n - 1));
  return survival * wt.w1() / (wt.w() + static_cast<double>(n) - 1.0);
}

std::vector<SampleConfiguration> enumerate_configurations(std::size_t n) {
  if (n > 20) throw LimitExceeded("enumerate_configurations: n must be at most 20");
  std::vector<SampleConfiguration> out;
  for (std::size_t n0 = 0; n0 <= n; ++n0) {
    const std::size_t m = n - n0;
    if (m == 0) {
      out.push_back({n0, {}});
      continue;
    }
    // Compositions of m <-> subsets of the m-1 cut points.
    const std::size_t cuts = m - 1;
    for (std::size_t mask = 0; mask < (std::size_t{1} << cuts); ++mask) {
      SampleConfiguration cfg{n0, {}};
      std::size_t run = 1;
      for (std::size_t i = 0; i < cuts; ++i) {
        if (mask & (std::size_t{1} << i)) {
          cfg.parts.push_back(run);
          run = 1;
        } else {
          ++run;
        }
      }
      cfg.parts.push_back(run);
      out.push_back(std::move(cfg));
    }
  }
  return out;
}

}  // namespace harmonic
