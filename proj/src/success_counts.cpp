#include "harmonic/success_counts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace harmonic {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

FinitePmf make_pmf(std::size_t size) {
  FinitePmf pmf;
  pmf.offset = 0;
  pmf.probs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size));
  return pmf;
}

// One step of the forward recursion: probabilities at time n -> n + 1.
void advance(const AlphaModel& model, std::size_t n, const Eigen::VectorXd& cur, Eigen::VectorXd& next) {
  const double w1 = model.weights().w1();
  const double w2 = model.weights().w2();
  const double denom = model.weights().w() + static_cast<double>(n);
  const double alpha = model.alpha();
  const auto width = static_cast<Eigen::Index>(n + 1);
  next.setZero(width + 1);
  for (Eigen::Index k = 0; k < width; ++k) {
    const double mass = cur[k];
    if (mass == 0.0) continue;
    const double up = w1 + static_cast<double>(k) * alpha;
    if (up > denom * (1.0 + 1e-15)) {
      throw ConsistencyError("pmf_successes: success probability exceeds one");
    }
    // 1 - up/denom written without the subtraction.
    const double stay = w2 + static_cast<double>(n) - static_cast<double>(k) * alpha;
    next[k] += mass * (std::max(stay, 0.0) / denom);
    next[k + 1] += mass * (up / denom);
  }
}

}  // namespace

FinitePmf pmf_successes(const AlphaModel& model, std::size_t n) {
  Eigen::VectorXd cur = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd next;
  for (std::size_t m = 0; m < n; ++m) {
    advance(model, m, cur, next);
    cur.swap(next);
  }
  FinitePmf pmf;
  pmf.probs = std::move(cur);
  sanitize(pmf);
  return pmf;
}

FinitePmf pmf_successes_closed_form(const Weights& weights, std::size_t n) {
  return pmf_successes_closed_form(weights, n, stirling_first_unsigned(n));
}

FinitePmf pmf_successes_closed_form(const Weights& weights, std::size_t n, const StirlingTable& table) {
  if (table.n_max() < n || table.k_max() < n) {
    throw LimitExceeded("pmf_successes_closed_form: Stirling table too small");
  }
  const double log_w1 = std::log(weights.w1());
  const double log_w2 = weights.w2() > 0.0 ? std::log(weights.w2()) : kNegInf;
  const double log_norm = log_rising_factorial(weights.w(), n);
  FinitePmf pmf = make_pmf(n + 1);
  std::vector<double> logs;
  for (std::size_t k = 0; k <= n; ++k) {
    logs.clear();
    for (std::size_t l = k; l <= n; ++l) {
      if (l > k && weights.w2() == 0.0) break;
      const double pow_w2 = l == k ? 0.0 : static_cast<double>(l - k) * log_w2;
      logs.push_back(log_binomial(l, k) + table.log_at(n, l) + pow_w2);
    }
    const double log_sum = log_sum_exp(logs);
    if (log_sum == kNegInf) continue;
    pmf.probs[static_cast<Eigen::Index>(k)] = std::exp(static_cast<double>(k) * log_w1 + log_sum - log_norm);
  }
  sanitize(pmf);
  return pmf;
}

FinitePmf pmf_successes_generalized_stirling(const Weights& weights, std::size_t n) {
  const GeneralizedStirlingTable table = generalized_stirling(n, weights.w2());
  const double norm = rising_factorial(weights.w(), n);
  FinitePmf pmf = make_pmf(n + 1);
  double pow_w1 = 1.0;
  for (std::size_t k = 0; k <= n; ++k) {
    pmf.probs[static_cast<Eigen::Index>(k)] = pow_w1 * table.at(n, k) / norm;
    pow_w1 *= weights.w1();
  }
  sanitize(pmf);
  return pmf;
}

FinitePmf pmf_successes_dobinski(const AlphaModel& model, std::size_t n, std::size_t limit) {
  if (!(model.alpha() > 0.0)) throw DomainError("pmf_successes_dobinski: alpha must be positive");
  const std::vector<Rational> stirling = dobinski_row_exact(n, model.alpha(), model.weights().w2(), limit);
  const Rational w1 = exact_rational(model.weights().w1());
  const Rational w2 = exact_rational(model.weights().w2());
  const Rational alpha = exact_rational(model.alpha());
  const Rational norm = rising_factorial(Rational(w1 + w2), n);
  FinitePmf pmf = make_pmf(n + 1);
  Rational prefix(1);  // [w1 | alpha]_k
  for (std::size_t k = 0; k <= n; ++k) {
    pmf.probs[static_cast<Eigen::Index>(k)] = to_double(prefix * stirling[k] / norm);
    prefix *= w1 + alpha * static_cast<long long>(k);
  }
  sanitize(pmf);
  return pmf;
}

double pgf_eval(const Weights& weights, std::size_t n, double z) {
  double value = 1.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double dm = static_cast<double>(m);
    value *= (weights.w1() * z + weights.w2() + dm) / (weights.w() + dm);
  }
  return value;
}

double factorial_moments(const Weights& weights, std::size_t n, std::size_t l) {
  if (l > n) return 0.0;
  return factorial_moments(weights, n, l, stirling_first_unsigned(n));
}

double factorial_moments(const Weights& weights, std::size_t n, std::size_t l, const StirlingTable& table) {
  if (l > n) return 0.0;
  if (l == 0) return 1.0;
  if (table.n_max() < n || table.k_max() < n) {
    throw LimitExceeded("factorial_moments: Stirling table too small");
  }
  const double log_w = std::log(weights.w());
  std::vector<double> logs;
  for (std::size_t k = l; k <= n; ++k) {
    const double log_falling = std::lgamma(static_cast<double>(k) + 1.0) - std::lgamma(static_cast<double>(k - l) + 1.0);
    logs.push_back(log_falling + table.log_at(n, k) + static_cast<double>(k - l) * log_w);
  }
  return std::exp(static_cast<double>(l) * std::log(weights.w1()) + log_sum_exp(logs) -
                  log_rising_factorial(weights.w(), n));
}

MeanVariance mean_variance(const AlphaModel& model, std::size_t n) {
  if (model.alpha() != 0.0) {
    throw DomainError("mean_variance: closed form only for alpha = 0");
  }
  const Weights& wt = model.weights();
  CompensatedSum mean;
  CompensatedSum var;
  for (std::size_t m = 0; m < n; ++m) {
    const double denom = wt.w() + static_cast<double>(m);
    mean.add(wt.w1() / denom);
    var.add(wt.w1() * (wt.w2() + static_cast<double>(m)) / (denom * denom));
  }
  return {mean.value(), var.value()};
}

double mean_successes(const AlphaModel& model, std::size_t n) {
  const double w1 = model.weights().w1();
  const double w = model.weights().w();
  double mean = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double denom = w + static_cast<double>(m);
    mean = mean * (1.0 + model.alpha() / denom) + w1 / denom;
  }
  return mean;
}

double power_model_mean(const Weights& weights, double a, std::size_t n) {
  if (!(a > 0.0)) throw DomainError("power_model_mean: exponent must be positive");
  CompensatedSum acc;
  for (std::size_t m = 0; m < n; ++m) {
    const double shift = m == 0 ? 0.0 : std::pow(static_cast<double>(m), a);
    acc.add(weights.w1() / (weights.w() + shift));
  }
  return acc.value();
}

SeriesValue power_model_mean_limit(const Weights& weights, double a) {
  if (!(a > 1.0)) throw DomainError("power_model_mean_limit: the series converges only for a > 1");
  const double w1 = weights.w1();
  const double w = weights.w();
  // Summand f(x) = w1/(w + x^a) is decreasing, so
  // int_{M+1}^inf f <= sum_{m>M} f(m) <= int_M^inf f, and
  // w1 x^-a - w w1 x^-2a <= f(x) <= w1 x^-a.
  auto upper = [&](double x) { return w1 * std::pow(x, 1.0 - a) / (a - 1.0); };
  auto lower = [&](double x) {
    return upper(x) - w * w1 * std::pow(x, 1.0 - 2.0 * a) / (2.0 * a - 1.0);
  };
  CompensatedSum acc;
  acc.add(w1 / w);
  double hi = 0.0;
  double lo = 0.0;
  for (std::size_t m = 1;; ++m) {
    const double dm = static_cast<double>(m);
    acc.add(w1 / (w + std::pow(dm, a)));
    hi = upper(dm);
    lo = std::max(0.0, lower(dm + 1.0));
    if (hi - lo <= 1e-13 * acc.value() || m >= 100'000'000) break;
  }
  return {acc.value() + 0.5 * (hi + lo), 0.5 * (hi - lo)};
}

double mean_variance_gap(const Weights& weights, std::size_t n) {
  CompensatedSum acc;
  for (std::size_t m = 0; m < n; ++m) {
    const double denom = weights.w() + static_cast<double>(m);
    acc.add(1.0 / (denom * denom));
  }
  return weights.w1() * weights.w1() * acc.value();
}

PoissonBoundReport poisson_bounds(const Weights& weights, std::size_t n) {
  if (n == 0) throw DomainError("poisson_bounds: n must be at least 1");
  const MeanVariance mv = mean_variance(AlphaModel(weights), n);
  const double mu = mv.mean;
  const double gap = mean_variance_gap(weights, n);

  // Smallest K > mu, K > n, with Chernoff bound e^-mu (e mu / K)^K < 1e-13.
  const double log_tol = std::log(1e-13);
  std::size_t cutoff = std::max<std::size_t>(n + 1, static_cast<std::size_t>(std::ceil(mu)) + 1);
  auto chernoff = [mu](double k) { return -mu + k * (1.0 + std::log(mu) - std::log(k)); };
  while (chernoff(static_cast<double>(cutoff)) >= log_tol) ++cutoff;

  const FinitePmf pmf = pmf_successes(AlphaModel(weights), n);
  CompensatedSum tv;
  const double log_mu = std::log(mu);
  for (std::size_t k = 0; k < cutoff; ++k) {
    const double dk = static_cast<double>(k);
    const double poisson = std::exp(dk * log_mu - mu - std::lgamma(dk + 1.0));
    tv.add(std::abs(pmf.at(k) - poisson));
  }

  PoissonBoundReport report;
  report.mu_n = mu;
  report.sigma2_n = mv.variance;
  report.tv_exact = 0.5 * tv.value();
  report.tv_lower = std::min(1.0, 1.0 / mu) * gap / 32.0;
  report.tv_upper = -std::expm1(-mu) * gap / mu;
  report.cutoff = cutoff;
  return report;
}

FinitePmf geometric_window_law(double p, double tol) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("geometric_window_law: p must lie in (0, 1)");
  if (!(tol > 0.0 && tol < 1.0)) throw DomainError("geometric_window_law: tol must lie in (0, 1)");
  const double q = 1.0 - p;
  const auto n_max = static_cast<std::size_t>(std::ceil(std::log(tol) / std::log(q)));
  FinitePmf law;
  law.offset = 1;
  law.probs.resize(static_cast<Eigen::Index>(n_max));
  double weight = p;
  for (std::size_t i = 0; i < n_max; ++i) {
    law.probs[static_cast<Eigen::Index>(i)] = weight;
    weight *= q;
  }
  law.deficit = std::pow(q, static_cast<double>(n_max));
  return law;
}

FinitePmf mix_over_window(const AlphaModel& model, const FinitePmf& window_law) {
  const std::size_t n_end = window_law.end();
  FinitePmf mixed = make_pmf(n_end == 0 ? 1 : n_end);
  Eigen::VectorXd cur = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd next;
  for (std::size_t n = 0; n < n_end; ++n) {
    const double weight = window_law.at(n);
    if (weight > 0.0) mixed.probs.head(cur.size()) += weight * cur;
    if (n + 1 < n_end) {
      advance(model, n, cur, next);
      cur.swap(next);
    }
  }
  mixed.deficit = window_law.deficit;
  sanitize(mixed, false);
  return mixed;
}

Eigen::MatrixXd success_step_matrix(const Weights& weights, std::size_t n, std::size_t states) {
  const auto size = static_cast<Eigen::Index>(states);
  const double denom = weights.w() + static_cast<double>(n);
  Eigen::MatrixXd step = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index k = 0; k < size; ++k) {
    step(k, k) = (weights.w2() + static_cast<double>(n)) / denom;
    if (k + 1 < size) step(k, k + 1) = weights.w1() / denom;
  }
  return step;
}

}  // namespace harmonic
