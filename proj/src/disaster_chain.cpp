#include "harmonic/disaster_chain.hpp"

#include "harmonic/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace harmonic {

namespace {

constexpr std::size_t kMaxCut = 100'000'000;

double power_of(std::size_t n, double alpha) {
  return n == 0 ? 0.0 : std::pow(static_cast<double>(n), alpha);
}

}  // namespace

ChainSpec::ChainSpec(Weights weights, double alpha) : weights_(weights), alpha_(alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("ChainSpec: alpha must be positive and finite");
}

double ChainSpec::q(std::size_t n) const { return weights_.w1() / (weights_.w() + power_of(n, alpha_)); }

double ChainSpec::p(std::size_t n) const {
  const double s = power_of(n, alpha_);
  return (weights_.w2() + s) / (weights_.w() + s);
}

std::string to_string(ChainClass c) {
  switch (c) {
    case ChainClass::absorbing_certain_extinction:
      return "absorbing_certain_extinction";
    case ChainClass::absorbing_possible_escape:
      return "absorbing_possible_escape";
    case ChainClass::transient:
      return "transient";
    case ChainClass::null_recurrent:
      return "null_recurrent";
    case ChainClass::positive_recurrent:
      return "positive_recurrent";
  }
  return "unknown";
}

ChainClass classify(const ChainSpec& spec) {
  const double a = spec.alpha();
  if (spec.weights().w2() == 0.0) {
    return a <= 1.0 ? ChainClass::absorbing_certain_extinction : ChainClass::absorbing_possible_escape;
  }
  if (a > 1.0) return ChainClass::transient;
  if (a < 1.0) return ChainClass::positive_recurrent;
  return spec.weights().w1() > 1.0 ? ChainClass::positive_recurrent : ChainClass::null_recurrent;
}

FinitePmf invariant_measure(const ChainSpec& spec, std::size_t n_max) {
  if (classify(spec) != ChainClass::positive_recurrent) {
    throw DomainError("invariant_measure: chain is " + to_string(classify(spec)) + ", not positive recurrent");
  }
  const double w1 = spec.weights().w1();
  const double w2 = spec.weights().w2();
  const double w = spec.weights().w();
  FinitePmf pi;
  pi.offset = 0;
  pi.probs.resize(static_cast<Eigen::Index>(n_max + 1));

  if (spec.alpha() == 1.0) {
    const double pi0 = (w1 - 1.0) / (w - 1.0);
    double r = 1.0;  // [w2]_n/[w]_n
    for (std::size_t n = 0; n <= n_max; ++n) {
      pi.probs[static_cast<Eigen::Index>(n)] = pi0 * r;
      const double dn = static_cast<double>(n);
      r *= (w2 + dn) / (w + dn);
    }
    // r now holds r_{N+1}.
    pi.deficit = pi0 * r * (w + static_cast<double>(n_max)) / (w1 - 1.0);
    return pi;
  }

  const double beta = 1.0 - spec.alpha();
  const double a = 1.0 / beta;
  const double c = w1 / (w + 1.0);
  auto remainder_bound = [&](std::size_t m, double u_m) {
    const double dm = static_cast<double>(m);
    const double x = c * std::pow(dm, beta) / beta;
    if (!(x > a - 1.0)) return std::numeric_limits<double>::infinity();
    return u_m * dm / (beta * (x - a + 1.0));
  };

  std::vector<double> u{1.0};
  CompensatedSum total;
  total.add(1.0);
  double bound = std::numeric_limits<double>::infinity();
  std::size_t m = 0;
  while (true) {
    const double next = u.back() * spec.p(m);
    ++m;
    u.push_back(next);
    total.add(next);
    if (m >= n_max && m % 64 == 0) {
      bound = remainder_bound(m, next);
      if (bound <= 1e-15 * total.value()) break;
    }
    if (m >= kMaxCut) throw LimitExceeded("invariant_measure: truncation cut exceeds 10^8");
  }
  const double z = total.value() + bound;
  CompensatedSum outside;
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (n <= n_max) {
      pi.probs[static_cast<Eigen::Index>(n)] = u[n] / z;
    } else {
      outside.add(u[n]);
    }
  }
  outside.add(bound);
  pi.deficit = outside.value() / z;
  return pi;
}

double stationarity_residual(const ChainSpec& spec, const FinitePmf& pi) {
  const std::size_t size = pi.size();
  if (size == 0) return 0.0;
  CompensatedSum inflow;
  for (std::size_t n = 0; n < size; ++n) inflow.add(pi.at(n) * spec.q(n));
  inflow.add(pi.at(size - 1) * spec.p(size - 1));
  double residual = std::abs(inflow.value() - pi.at(0));
  for (std::size_t n = 1; n < size; ++n) {
    residual = std::max(residual, std::abs(pi.at(n - 1) * spec.p(n - 1) - pi.at(n)));
  }
  return residual;
}

TruncatedMatrix truncated_matrix(const ChainSpec& spec, std::size_t n) {
  if (n == 0) throw DomainError("truncated_matrix: n must be at least 1");
  const auto size = static_cast<Eigen::Index>(n + 1);
  TruncatedMatrix out{n, Eigen::MatrixXd::Zero(size, size)};
  for (Eigen::Index i = 0; i < size; ++i) {
    out.entries(i, 0) = spec.q(static_cast<std::size_t>(i));
    if (i + 1 < size) out.entries(i, i + 1) = spec.p(static_cast<std::size_t>(i));
  }
  return out;
}

namespace {

// v <- P_(n) v.
void apply_truncated(const std::vector<double>& q, const std::vector<double>& p, std::vector<double>& v) {
  const std::size_t size = v.size();
  const double v0 = v[0];
  for (std::size_t i = 0; i < size; ++i) {
    const double up = i + 1 < size ? v[i + 1] : 0.0;
    v[i] = q[i] * v0 + p[i] * up;
  }
}

void chain_coefficients(const ChainSpec& spec, std::size_t n, std::vector<double>& q, std::vector<double>& p) {
  q.resize(n + 1);
  p.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    q[i] = spec.q(i);
    p[i] = spec.p(i);
  }
}

}  // namespace

double overcrossing_tail(const ChainSpec& spec, std::size_t n0, std::size_t n, std::size_t l) {
  if (n0 > n) throw DomainError("overcrossing_tail: need n0 <= n");
  std::vector<double> q, p;
  chain_coefficients(spec, n, q, p);
  std::vector<double> v(n + 1, 1.0);
  for (std::size_t step = 0; step < l; ++step) apply_truncated(q, p, v);
  return v[n0];
}

double expected_overcrossing(const ChainSpec& spec, std::size_t n0, std::size_t n) {
  if (n0 > n) throw DomainError("expected_overcrossing: need n0 <= n");
  std::vector<double> a(n + 2, 0.0);
  std::vector<double> log_climb(n + 2, 0.0);  // log prod_{j=i}^{n} p_j
  for (std::size_t i = n + 1; i-- > 0;) {
    const double p = spec.p(i);
    if (p == 0.0) throw Infeasible("expected_overcrossing: infinite (a state cannot climb)");
    a[i] = 1.0 + p * a[i + 1];
    log_climb[i] = std::log(p) + log_climb[i + 1];
  }
  const double x0 = a[0] * std::exp(-log_climb[0]);
  const double b = -std::expm1(log_climb[n0]);
  const double x = a[n0] + b * x0;
  if (!std::isfinite(x)) throw ConsistencyError("expected_overcrossing: singular system");
  return x;
}

double expected_overcrossing_dense(const ChainSpec& spec, std::size_t n0, std::size_t n) {
  if (n0 > n) throw DomainError("expected_overcrossing_dense: need n0 <= n");
  const TruncatedMatrix tm = truncated_matrix(spec, std::max<std::size_t>(n, 1));
  const Eigen::Index size = tm.entries.rows();
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(size, size) - tm.entries;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) throw ConsistencyError("expected_overcrossing_dense: singular system");
  const Eigen::VectorXd x = lu.solve(Eigen::VectorXd::Ones(size));
  return x[static_cast<Eigen::Index>(n0)];
}

double spectral_radius(const ChainSpec& spec, std::size_t n) {
  std::vector<double> q, p;
  chain_coefficients(spec, n, q, p);
  // P_(n) is irreducible (0 -> 1 -> ... -> n -> 0) and aperiodic (q_0 > 0), so
  // min and max of (Pv)_i / v_i over a positive v bracket the Perron root.
  std::vector<double> v(n + 1, 1.0);
  std::vector<double> prev(n + 1);
  for (int it = 0; it < 1'000'000; ++it) {
    prev = v;
    apply_truncated(q, p, v);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      const double ratio = v[i] / prev[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    if (hi == 0.0) return 0.0;
    if (hi - lo <= 1e-10 * hi) return 0.5 * (lo + hi);
    const double norm = *std::max_element(v.begin(), v.end());
    for (double& x : v) x /= norm;
  }
  throw NonConvergence("spectral_radius: power iteration did not settle");
}

ExtinctionPgf extinction_pgf(double w1, double alpha, std::size_t n, double z) {
  if (!(z >= 0.0 && z < 1.0)) throw DomainError("extinction_pgf: z must lie in [0, 1)");
  const ChainSpec spec(Weights(w1, 0.0), alpha);
  ExtinctionPgf out;
  if (n == 0) {
    out.value = 1.0;
    return out;
  }

  // Series: reset from state m after m - n climbs.
  CompensatedSum value;
  double climb = 1.0;  // prod_{k=n}^{m-1} p_k
  double zpow = z;     // z^(m-n+1)
  for (std::size_t m = n;; ++m) {
    value.add(spec.q(m) * zpow * climb);
    climb *= spec.p(m);
    zpow *= z;
    const double bound = zpow * climb;  // z^(m-n+2) prod_{k=n}^{m} p_k
    if (bound <= 1e-17 || m - n >= kMaxCut) {
      out.truncation_bound = bound;
      break;
    }
  }
  out.value = value.value();

  if (alpha <= 1.0) return out;

  // Escape mass: sum of log p_m to a cut M, then the remainder
  // sum_{m>M} g(m), g(x) = log(1 + w1 x^-alpha), convex and decreasing.
  // Midpoint and trapezoid comparisons give
  //   int_{M+1}^inf g + g(M+1)/2 <= sum <= int_{M+1/2}^inf g,
  // and y - y^2/2 <= log(1+y) <= y - y^2/2 + y^3/3 (0 < y < 1) brackets the
  // integrals through I_j(a) = int_a^inf y^j/j = w1^j a^(1-j alpha)/(j (j alpha - 1)).
  CompensatedSum log_escape;
  auto moment = [&](int j, double a) {
    return std::pow(w1, j) * std::pow(a, 1.0 - j * alpha) / (j * (j * alpha - 1.0));
  };
  std::size_t m = n;
  double hi = 0.0;
  double lo = 0.0;
  while (true) {
    log_escape.add(std::log(spec.p(m)));
    const double mid = static_cast<double>(m) + 0.5;
    const double next = static_cast<double>(m) + 1.0;
    if (w1 * std::pow(mid, -alpha) < 1.0) {
      hi = moment(1, mid) - moment(2, mid) + moment(3, mid);
      lo = moment(1, next) - moment(2, next) + 0.5 * std::log1p(w1 * std::pow(next, -alpha));
      if (hi - lo <= 1e-15 || m - n >= 10'000'000) break;
    }
    ++m;
  }
  const double tail_mid = 0.5 * (hi + lo);
  const double log_mass = log_escape.value() - tail_mid;
  out.escape_mass = std::exp(log_mass);
  out.escape_error = out.escape_mass * std::expm1(0.5 * (hi - lo));
  return out;
}

}  // namespace harmonic
