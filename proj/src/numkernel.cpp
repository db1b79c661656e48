#include "harmonic/numkernel.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace harmonic {

namespace {

constexpr std::size_t kDirectLogTerms = 4096;
constexpr double kLn2 = 0.69314718055994530942;

// x = mantissa * 2^exponent with an integer mantissa.
struct Dyadic {
  BigInt mantissa;
  int exponent = 0;
};

Dyadic to_dyadic(double x) {
  if (!std::isfinite(x)) throw DomainError("exact conversion of a non-finite value");
  if (x == 0.0) return {BigInt(0), 0};
  int e = 0;
  const double m = std::frexp(x, &e);
  const auto scaled = static_cast<long long>(std::ldexp(m, 53));
  return {BigInt(scaled), e - 53};
}

}  // namespace

double log_rising_factorial(double z, std::size_t n) {
  if (!(z > 0.0)) throw DomainError("log_rising_factorial: z must be positive");
  if (n == 0) return 0.0;
  if (n <= kDirectLogTerms) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < n; ++i) acc.add(std::log(z + static_cast<double>(i)));
    return acc.value();
  }
  return std::lgamma(z + static_cast<double>(n)) - std::lgamma(z);
}

double log_rising_ratio(double a, double b, std::size_t n) {
  if (!(b > 0.0) || a < 0.0) throw DomainError("log_rising_ratio: need a >= 0, b > 0");
  if (n == 0) return 0.0;
  if (a == 0.0) return -std::numeric_limits<double>::infinity();
  const std::size_t direct = std::min(n, kDirectLogTerms);
  const double diff = a - b;
  CompensatedSum acc;
  for (std::size_t i = 0; i < direct; ++i) acc.add(std::log1p(diff / (b + static_cast<double>(i))));
  if (n > direct) {
    const double nn = static_cast<double>(n);
    const double d0 = static_cast<double>(direct);
    acc.add((std::lgamma(a + nn) - std::lgamma(a + d0)) - (std::lgamma(b + nn) - std::lgamma(b + d0)));
  }
  return acc.value();
}

double log_generalized_rising(double x, double step, std::size_t k) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < k; ++i) {
    const double factor = x + static_cast<double>(i) * step;
    if (factor == 0.0) return -std::numeric_limits<double>::infinity();
    if (factor < 0.0) throw DomainError("log_generalized_rising: negative factor");
    acc.add(std::log(factor));
  }
  return acc.value();
}

double log_binomial(std::size_t n, std::size_t k) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  const auto dn = static_cast<double>(n);
  const auto dk = static_cast<double>(k);
  return std::lgamma(dn + 1.0) - std::lgamma(dk + 1.0) - std::lgamma(dn - dk + 1.0);
}

double digamma_difference(double x, double n) {
  if (!(x > 0.0)) throw DomainError("digamma_difference: x must be positive");
  if (n <= 64.0 && n == std::floor(n)) {
    CompensatedSum acc;
    for (int m = 0; m < static_cast<int>(n); ++m) acc.add(1.0 / (x + m));
    return acc.value();
  }
  return digamma(x + n) - digamma(x);
}

Rational exact_rational(double x) {
  const Dyadic d = to_dyadic(x);
  if (d.exponent >= 0) return Rational(d.mantissa << d.exponent);
  return Rational(d.mantissa, BigInt(1) << -d.exponent);
}

double to_double(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (num == 0) return 0.0;
  const bool negative = num < 0;
  const BigInt mag = negative ? BigInt(-num) : num;
  const long nb = static_cast<long>(boost::multiprecision::msb(mag));
  const long db = static_cast<long>(boost::multiprecision::msb(den));
  const long shift = 64 - (nb - db);
  BigInt q = shift >= 0 ? BigInt((mag << shift) / den) : BigInt(mag / (den << -shift));
  const double value = std::ldexp(q.convert_to<double>(), static_cast<int>(-shift));
  return negative ? -value : value;
}

double log_abs(const BigInt& v) {
  if (v == 0) return -std::numeric_limits<double>::infinity();
  const BigInt mag = v < 0 ? BigInt(-v) : v;
  const auto bits = boost::multiprecision::msb(mag) + 1;
  if (bits <= 960) return std::log(mag.convert_to<double>());
  const auto shift = bits - 64;
  const BigInt top = mag >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * kLn2;
}

// ---------------------------------------------------------------------------

const BigInt StirlingTable::zero_{0};

StirlingTable::StirlingTable(std::size_t n_max, std::size_t k_max)
    : n_max_(n_max), k_max_(std::min(k_max, n_max)) {
  rows_.resize(n_max_ + 1);
  logs_.resize(n_max_ + 1);
  rows_[0] = {BigInt(1)};
  for (std::size_t n = 0; n < n_max_; ++n) {
    const std::size_t width = std::min(n + 1, k_max_) + 1;
    auto& next = rows_[n + 1];
    next.assign(width, BigInt(0));
    const auto& cur = rows_[n];
    for (std::size_t k = 0; k < width; ++k) {
      BigInt value = k < cur.size() ? BigInt(cur[k] * n) : BigInt(0);
      if (k >= 1 && k - 1 < cur.size()) value += cur[k - 1];
      next[k] = std::move(value);
    }
  }
  for (std::size_t n = 0; n <= n_max_; ++n) {
    logs_[n].reserve(rows_[n].size());
    for (const auto& v : rows_[n]) logs_[n].push_back(log_abs(v));
  }
}

const BigInt& StirlingTable::at(std::size_t n, std::size_t k) const {
  if (n > n_max_ || k > k_max_) throw std::out_of_range("StirlingTable::at outside table");
  return k < rows_[n].size() ? rows_[n][k] : zero_;
}

double StirlingTable::log_at(std::size_t n, std::size_t k) const {
  if (n > n_max_ || k > k_max_) throw std::out_of_range("StirlingTable::log_at outside table");
  return k < logs_[n].size() ? logs_[n][k] : -std::numeric_limits<double>::infinity();
}

StirlingTable stirling_first_unsigned(std::size_t n_max, StirlingOptions options) {
  if (n_max > options.limit) {
    throw LimitExceeded("Stirling table size " + std::to_string(n_max) + " exceeds limit " +
                        std::to_string(options.limit));
  }
  return StirlingTable(n_max, options.k_max);
}

GeneralizedStirlingTable generalized_stirling(std::size_t n_max, double r, std::size_t limit) {
  if (n_max > limit) {
    throw LimitExceeded("generalized Stirling size " + std::to_string(n_max) + " exceeds limit " +
                        std::to_string(limit));
  }
  GeneralizedStirlingTable table;
  table.n_max = n_max;
  table.r = r;
  const auto size = static_cast<Eigen::Index>(n_max + 1);
  table.entries = Eigen::MatrixXd::Zero(size, size);
  table.entries(0, 0) = 1.0;
  for (Eigen::Index n = 0; n + 1 < size; ++n) {
    const double factor = static_cast<double>(n) + r;
    for (Eigen::Index k = 0; k <= n + 1; ++k) {
      const double stay = k <= n ? factor * table.entries(n, k) : 0.0;
      const double step = k >= 1 ? table.entries(n, k - 1) : 0.0;
      table.entries(n + 1, k) = step + stay;
    }
  }
  return table;
}

// ---------------------------------------------------------------------------

std::vector<Rational> dobinski_row_exact(std::size_t n, double alpha, double w2, std::size_t limit) {
  if (alpha == 0.0) throw DomainError("dobinski: alpha must be nonzero");
  if (n > limit) {
    throw LimitExceeded("Dobinski exact evaluation for n = " + std::to_string(n) +
                        " exceeds limit " + std::to_string(limit));
  }
  // Bring alpha and w2 to a common dyadic scale: alpha = a / D, w2 = b / D.
  const Dyadic da = to_dyadic(alpha);
  const Dyadic db = to_dyadic(w2);
  const int e = std::min({da.exponent, db.exponent, 0});
  const BigInt a = da.mantissa << (da.exponent - e);
  const BigInt b = db.mantissa << (db.exponent - e);
  const BigInt scale = BigInt(1) << -e;

  // P_l = prod_{i<n} (b - l a + i D) = D^n [w2 - l alpha]_n.
  std::vector<BigInt> products(n + 1);
  for (std::size_t l = 0; l <= n; ++l) {
    BigInt base = b - a * static_cast<long long>(l);
    BigInt acc(1);
    for (std::size_t i = 0; i < n; ++i) {
      acc *= base;
      base += scale;
    }
    products[l] = std::move(acc);
  }

  std::vector<Rational> row(n + 1);
  BigInt binom_row_k_fact(1);  // k!
  BigInt a_pow(1);             // a^k
  BigInt d_pow(1);             // D^k
  const BigInt d_n = boost::multiprecision::pow(scale, static_cast<unsigned>(n));
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) {
      binom_row_k_fact *= static_cast<long long>(k);
      a_pow *= a;
      d_pow *= scale;
    }
    BigInt sum(0);
    BigInt binom(1);
    for (std::size_t l = 0; l <= k; ++l) {
      if (l > 0) binom = binom * static_cast<long long>(k - l + 1) / static_cast<long long>(l);
      if (l % 2 == 0) {
        sum += binom * products[l];
      } else {
        sum -= binom * products[l];
      }
    }
    row[k] = Rational(sum * d_pow, a_pow * binom_row_k_fact * d_n);
  }
  return row;
}

double dobinski_generalized(std::size_t n, std::size_t k, double alpha, double w2) {
  if (k > n) return 0.0;
  if (n == 0) return 1.0;
  return to_double(dobinski_row_exact(n, alpha, w2, std::max(n, kDobinskiExactLimit))[k]);
}

CompensatedValue dobinski_generalized_compensated(std::size_t n, std::size_t k, double alpha,
                                                  double w2) {
  if (alpha == 0.0) throw DomainError("dobinski: alpha must be nonzero");
  if (k > n) return {0.0, 1.0};
  CompensatedSum sum;
  double magnitude = 0.0;
  double binom = 1.0;
  for (std::size_t l = 0; l <= k; ++l) {
    if (l > 0) binom = binom * static_cast<double>(k - l + 1) / static_cast<double>(l);
    const double term = binom * rising_factorial(w2 - static_cast<double>(l) * alpha, n);
    sum.add(l % 2 == 0 ? term : -term);
    magnitude += std::abs(term);
  }
  const double scale = std::pow(alpha, -static_cast<double>(k)) / std::tgamma(static_cast<double>(k) + 1.0);
  const double raw = sum.value();
  const double condition = raw == 0.0 ? std::numeric_limits<double>::infinity() : magnitude / std::abs(raw);
  return {raw * scale, magnitude == 0.0 ? 1.0 : condition};
}

// ---------------------------------------------------------------------------

double gauss_f1(double b, double c, double z) {
  if (!(c > 0.0)) throw DomainError("gauss_f1: c must be positive");
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("gauss_f1: z must lie in [0, 1]");
  if (z == 1.0) {
    if (!(c - 1.0 - b > 0.0)) throw NonConvergence("gauss_f1: series diverges at z = 1");
    return (c - 1.0) / (c - 1.0 - b);
  }
  constexpr std::size_t kMaxTerms = 1'000'000;
  double sum = 1.0;
  double term = 1.0;
  for (std::size_t n = 0; n < kMaxTerms; ++n) {
    const double dn = static_cast<double>(n);
    term *= (b + dn) / (c + dn) * z;
    sum += term;
    if (term == 0.0) return sum;
    if (b + dn + 1.0 >= 0.0) {
      // Later term ratios move monotonically toward z.
      const double next = std::abs((b + dn + 1.0) / (c + dn + 1.0)) * z;
      const double bound = std::max(next, z);
      if (bound < 1.0 && std::abs(term) * bound / (1.0 - bound) < 1e-14 * std::max(1.0, std::abs(sum))) {
        return sum;
      }
    }
  }
  throw NonConvergence("gauss_f1: series did not converge within 10^6 terms");
}

std::vector<double> gauss_f1_partial_sums(double b, double c, double z, std::size_t terms) {
  std::vector<double> sums;
  sums.reserve(terms);
  double sum = 1.0;
  double term = 1.0;
  for (std::size_t n = 0; n < terms; ++n) {
    sums.push_back(sum);
    const double dn = static_cast<double>(n);
    term *= (b + dn) / (c + dn) * z;
    sum += term;
  }
  return sums;
}

double log_sum_exp(const std::vector<double>& xs) {
  double top = -std::numeric_limits<double>::infinity();
  for (double x : xs) top = std::max(top, x);
  if (!std::isfinite(top)) return top;
  CompensatedSum acc;
  for (double x : xs) {
    if (x != -std::numeric_limits<double>::infinity()) acc.add(std::exp(x - top));
  }
  return top + std::log(acc.value());
}

}  // namespace harmonic
