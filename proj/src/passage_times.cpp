#include "harmonic/passage_times.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace harmonic {

namespace {

// Success-count probabilities pi_n(k) for k < width only. Lower entries never
// depend on higher ones, so the truncation is exact.
class TruncatedCounts {
 public:
  TruncatedCounts(const Weights& weights, std::size_t width)
      : weights_(weights), probs_(std::max<std::size_t>(width, 1), 0.0) {
    probs_[0] = 1.0;
  }

  std::size_t time() const noexcept { return n_; }
  double at(std::size_t k) const { return k < probs_.size() ? probs_[k] : 0.0; }

  /// P(S_n < width).
  double mass() const {
    CompensatedSum acc;
    for (double p : probs_) acc.add(p);
    return acc.value();
  }

  void step() {
    const double denom = weights_.w() + static_cast<double>(n_);
    const double up = weights_.w1() / denom;
    const double stay = (weights_.w2() + static_cast<double>(n_)) / denom;
    for (std::size_t k = probs_.size(); k-- > 0;) {
      probs_[k] = probs_[k] * stay + (k > 0 ? probs_[k - 1] * up : 0.0);
    }
    ++n_;
  }

 private:
  Weights weights_;
  std::vector<double> probs_;
  std::size_t n_ = 0;
};

// 1 - [w2+m]_i/[w+m]_i without cancellation.
double failure_run_complement(const Weights& weights, double m, std::size_t i) {
  return -std::expm1(log_rising_ratio(weights.w2() + m, weights.w() + m, i));
}

}  // namespace

TriangularTable::TriangularTable(Eigen::MatrixXd entries, Eigen::VectorXd deficits)
    : entries_(std::move(entries)), deficits_(std::move(deficits)) {}

double TriangularTable::at(std::size_t n, std::size_t l) const {
  if (n == 0 || l == 0 || n > n_max() || l > l_max()) {
    throw std::out_of_range("TriangularTable::at outside table");
  }
  return entries_(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(l - 1));
}

double TriangularTable::deficit(std::size_t l) const {
  if (l == 0 || l > l_max()) throw std::out_of_range("TriangularTable::deficit outside table");
  return deficits_[static_cast<Eigen::Index>(l - 1)];
}

FinitePmf TriangularTable::column(std::size_t l) const {
  FinitePmf pmf;
  pmf.offset = 1;
  pmf.probs = entries_.col(static_cast<Eigen::Index>(l - 1));
  pmf.deficit = deficit(l);
  return pmf;
}

TriangularTable passage_table(const Weights& weights, std::size_t l_max, std::size_t n_max) {
  if (l_max == 0 || n_max == 0) throw DomainError("passage_table: l_max and n_max must be positive");
  const double w1 = weights.w1();
  const double w2 = weights.w2();
  const double w = weights.w();
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_max), static_cast<Eigen::Index>(l_max));

  double survival = 1.0;  // [w2]_{n-1}/[w]_{n-1}
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double dn = static_cast<double>(n);
    table(static_cast<Eigen::Index>(n - 1), 0) = survival * w1 / (w + dn - 1.0);
    survival *= (w2 + dn - 1.0) / (w + dn - 1.0);
  }
  for (std::size_t l = 1; l < l_max; ++l) {
    const auto col = static_cast<Eigen::Index>(l);
    for (std::size_t n = l; n < n_max; ++n) {
      const double dn = static_cast<double>(n);
      const auto row = static_cast<Eigen::Index>(n - 1);
      const double from_left = w1 / (w + dn) * table(row, col - 1);
      const double from_above = (w2 + dn - 1.0) / (w + dn) * table(row, col);
      table(row + 1, col) = from_left + from_above;
    }
  }

  TruncatedCounts counts(weights, l_max);
  for (std::size_t n = 0; n < n_max; ++n) counts.step();
  Eigen::VectorXd deficits(static_cast<Eigen::Index>(l_max));
  CompensatedSum below;
  for (std::size_t l = 1; l <= l_max; ++l) {
    below.add(counts.at(l - 1));
    deficits[static_cast<Eigen::Index>(l - 1)] = below.value();
  }
  return TriangularTable(std::move(table), std::move(deficits));
}

double passage_pmf_ewens(double w1, std::size_t l, std::size_t n) {
  if (l == 0 || n < l) return 0.0;
  return passage_pmf_ewens(w1, l, n, stirling_first_unsigned(n - 1, {.limit = std::max(n, kDefaultStirlingLimit)}));
}

double passage_pmf_ewens(double w1, std::size_t l, std::size_t n, const StirlingTable& table) {
  if (!(w1 > 0.0)) throw DomainError("passage_pmf_ewens: w1 must be positive");
  if (l == 0 || n < l) return 0.0;
  if (table.n_max() < n - 1 || table.k_max() < l - 1) {
    throw LimitExceeded("passage_pmf_ewens: Stirling table too small");
  }
  const double log_value = static_cast<double>(l - 1) * std::log(w1) + table.log_at(n - 1, l - 1) -
                           log_rising_factorial(w1 + 1.0, n - 1);
  return std::exp(log_value);
}

FinitePmf excess_pmf(const Weights& weights, std::size_t l, std::size_t n_max) {
  if (l == 0) throw DomainError("excess_pmf: l must be positive");
  if (n_max < l) throw DomainError("excess_pmf: n_max must be at least l");
  const double w1 = weights.w1();
  const double w2 = weights.w2();
  const double w = weights.w();
  const std::size_t span = n_max - l + 1;  // j = 0..n_max-l

  Eigen::VectorXd cur(static_cast<Eigen::Index>(span));
  double survival = 1.0;
  for (std::size_t j = 0; j < span; ++j) {
    const double dj = static_cast<double>(j);
    cur[static_cast<Eigen::Index>(j)] = survival * w1 / (w + dj);
    survival *= (w2 + dj) / (w + dj);
  }
  Eigen::VectorXd next(static_cast<Eigen::Index>(span));
  for (std::size_t level = 1; level < l; ++level) {
    const double dl = static_cast<double>(level);
    for (std::size_t j = 0; j < span; ++j) {
      const double dj = static_cast<double>(j);
      const double from_same = w1 / (w + dj + dl) * cur[static_cast<Eigen::Index>(j)];
      const double from_prev = j == 0 ? 0.0 : (w2 + dj + dl - 1.0) / (w + dj + dl) * next[static_cast<Eigen::Index>(j - 1)];
      next[static_cast<Eigen::Index>(j)] = from_same + from_prev;
    }
    cur.swap(next);
  }

  TruncatedCounts counts(weights, l);
  for (std::size_t n = 0; n < n_max; ++n) counts.step();

  FinitePmf pmf;
  pmf.offset = 0;
  pmf.probs = std::move(cur);
  pmf.deficit = counts.mass();
  sanitize(pmf, false);
  return pmf;
}

double GapLaw::tail(std::size_t i) const {
  CompensatedSum acc;
  acc.add(1.0);
  for (std::size_t j = 1; j <= i; ++j) acc.add(-pmf.at(j));
  return acc.value();
}

GapLaw gap_pmf(const Weights& weights, std::size_t l, std::size_t i_max, GapOptions options) {
  if (l < 2) throw DomainError("gap_pmf: l must be at least 2");
  if (i_max == 0) throw DomainError("gap_pmf: i_max must be positive");
  const double w1 = weights.w1();
  const double w2 = weights.w2();
  const double w = weights.w();
  const std::size_t prev = l - 1;  // condition on K_{prev}+

  auto bound_at = [&](std::size_t horizon, double mass) {
    const double h = static_cast<double>(horizon);
    const double pmf_err = mass * w1 / (w + h);
    const double tail_err = mass * failure_run_complement(weights, h + 1.0, i_max);
    return std::max(pmf_err, tail_err);
  };

  std::size_t horizon = options.horizon;
  if (horizon == 0) {
    TruncatedCounts counts(weights, prev);
    std::size_t next_check = 64;
    while (true) {
      counts.step();
      if (counts.time() == next_check) {
        if (bound_at(counts.time(), counts.mass()) <= options.tolerance || next_check >= options.horizon_cap) {
          break;
        }
        next_check *= 2;
      }
    }
    horizon = counts.time();
  }

  // Main pass: accumulate conditional gap laws given K_prev+ = n, n <= horizon.
  std::vector<CompensatedSum> acc(i_max);
  CompensatedSum in_horizon_tail;
  TruncatedCounts counts(weights, prev);
  for (std::size_t n = 1; n <= horizon; ++n) {
    const double dn = static_cast<double>(n);
    const double hit = counts.at(prev - 1) * w1 / (w + dn - 1.0);  // P(K_prev+ = n)
    counts.step();
    if (hit == 0.0) continue;
    double run = hit;  // P(K_prev+ = n, trials n+1..n+i-1 fail)
    for (std::size_t i = 1; i <= i_max; ++i) {
      const double denom = w + dn + static_cast<double>(i) - 1.0;
      acc[i - 1].add(run * w1 / denom);
      run *= (w2 + dn + static_cast<double>(i) - 1.0) / denom;
    }
    in_horizon_tail.add(run);
  }
  const double horizon_mass = counts.mass();

  GapLaw law;
  law.l = l;
  law.horizon = horizon;
  law.pmf.offset = 1;
  law.pmf.probs.resize(static_cast<Eigen::Index>(i_max));
  for (std::size_t i = 0; i < i_max; ++i) law.pmf.probs[static_cast<Eigen::Index>(i)] = acc[i].value();
  law.pmf.deficit = horizon_mass + in_horizon_tail.value();
  law.horizon_mass = horizon_mass;
  const double h = static_cast<double>(horizon);
  law.pmf_error = horizon_mass * w1 / (w + h);
  law.tail_errors.resize(static_cast<Eigen::Index>(i_max + 1));
  for (std::size_t i = 0; i <= i_max; ++i) {
    law.tail_errors[static_cast<Eigen::Index>(i)] =
        i == 0 ? 0.0 : horizon_mass * failure_run_complement(weights, h + 1.0, i);
  }
  law.certified = std::max(law.pmf_error, law.tail_errors.maxCoeff()) <= options.tolerance;
  sanitize(law.pmf, false);
  return law;
}

double gap_tail_neuts(std::size_t l, std::size_t i) {
  Rational sum(0);
  BigInt binom(1);
  for (std::size_t k = 0; k <= i; ++k) {
    if (k > 0) binom = binom * static_cast<long long>(i - k + 1) / static_cast<long long>(k);
    const BigInt base = boost::multiprecision::pow(BigInt(static_cast<long long>(k + 1)), static_cast<unsigned>(l));
    const Rational term(binom, base);
    if (k % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  return to_double(sum);
}

double conditional_gap_tail(const Weights& weights, std::size_t m, std::size_t n) {
  if (m == 0) throw DomainError("conditional_gap_tail: m must be at least 1");
  const double dm = static_cast<double>(m);
  return std::exp(log_rising_ratio(weights.w2() + dm, weights.w() + dm, n));
}

TailAsymptote tail_asymptote(const Weights& weights, std::size_t m) {
  if (weights.w2() == 0.0 && m == 0) {
    throw DomainError("tail_asymptote: need w2 > 0 or m >= 1");
  }
  const double dm = static_cast<double>(m);
  return {weights.w1(), std::exp(std::lgamma(weights.w() + dm) - std::lgamma(weights.w2() + dm))};
}

}  // namespace harmonic
