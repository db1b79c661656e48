#include "harmonic/estimation.hpp"

#include "harmonic/numkernel.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace harmonic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxIterations = 200;
constexpr double kScoreTolerance = 1e-9;

struct Root {
  double x = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Root of f in [a, b] given f(a) > 0 >= f(b), to full double precision.
Root solve_bracketed(const std::function<double(double)>& f, double a, double b, double fa, double fb) {
  if (fb == 0.0) return {b, 0, true};
  boost::uintmax_t iters = kMaxIterations;
  const auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, fa, fb,
                                                          boost::math::tools::eps_tolerance<double>(52), iters);
  const double flo = f(lo);
  const double fhi = f(hi);
  return {std::abs(flo) <= std::abs(fhi) ? lo : hi, static_cast<int>(iters), iters < kMaxIterations};
}

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double f_lo = 0.0;
  double f_hi = 0.0;
};

enum class ScanOutcome { bracketed, negative_at_start, positive_throughout };

// Scans f on an even grid of [t0, t1] for the first change from a positive
// value to a nonpositive one. Non-finite values are skipped as unusable.
std::pair<ScanOutcome, Bracket> scan(const std::function<double(double)>& f, double t0, double t1, int steps) {
  bool have_prev = false;
  double t_prev = t0;
  double f_prev = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(steps);
    const double v = f(t);
    if (!std::isfinite(v)) continue;
    if (!have_prev) {
      if (v <= 0.0) return {ScanOutcome::negative_at_start, {t, t, v, v}};
      have_prev = true;
    } else if (v <= 0.0) {
      return {ScanOutcome::bracketed, {t_prev, t, f_prev, v}};
    }
    t_prev = t;
    f_prev = v;
  }
  return {have_prev ? ScanOutcome::positive_throughout : ScanOutcome::negative_at_start, {}};
}

// Central second differences of f with steps h_i = max(1e-5, 1e-5 |x_i|).
Eigen::MatrixXd numeric_hessian(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x) {
  const Eigen::Index d = x.size();
  Eigen::VectorXd h(d);
  for (Eigen::Index i = 0; i < d; ++i) h[i] = std::max(1e-5, 1e-5 * std::abs(x[i]));
  Eigen::MatrixXd hess(d, d);
  const double f0 = f(x);
  for (Eigen::Index i = 0; i < d; ++i) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[i] += h[i];
    xm[i] -= h[i];
    hess(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (h[i] * h[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      Eigen::VectorXd pp = x, pm = x, mp = x, mm = x;
      pp[i] += h[i]; pp[j] += h[j];
      pm[i] += h[i]; pm[j] -= h[j];
      mp[i] -= h[i]; mp[j] += h[j];
      mm[i] -= h[i]; mm[j] -= h[j];
      hess(i, j) = hess(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h[i] * h[j]);
    }
  }
  return hess;
}

// Central first differences of an analytic gradient, symmetrized.
Eigen::MatrixXd gradient_hessian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& g,
                                 const Eigen::VectorXd& x) {
  const Eigen::Index d = x.size();
  Eigen::MatrixXd hess(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double h = std::max(1e-5, 1e-5 * std::abs(x[j]));
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[j] += h;
    xm[j] -= h;
    hess.col(j) = (g(xp) - g(xm)) / (2.0 * h);
  }
  return 0.5 * (hess + hess.transpose());
}

std::optional<Eigen::MatrixXd> covariance_from_hessian(const Eigen::MatrixXd& hess) {
  if (!hess.allFinite()) return std::nullopt;
  const Eigen::MatrixXd info = -hess;
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(info.rows(), info.cols()));
  cov = 0.5 * (cov + cov.transpose());
  if (!cov.allFinite()) return std::nullopt;
  return cov;
}

// Weights or nullopt when the pair is outside the parameter space.
std::optional<Weights> try_weights(double w1, double w2) {
  if (!(w1 > 0.0) || !(w2 >= 0.0) || !std::isfinite(w1) || !std::isfinite(w2)) return std::nullopt;
  return Weights(w1, w2);
}

EstimateReport boundary_report(Constraint c, Boundary b, double w1, double w2, double loglik) {
  EstimateReport r;
  r.constraint = c;
  r.boundary = b;
  r.w1_hat = w1;
  r.w2_hat = w2;
  r.loglik = loglik;
  r.converged = false;
  return r;
}

double d_sum(double w, std::size_t n) { return digamma_difference(w, static_cast<double>(n)); }

// Positive root of k - w1 D(w1 + v) = 0 (sign of the w2=v score), searched
// in log w1. The function is strictly decreasing in w1.
Root solve_w2_fixed(std::size_t n, std::size_t k, double v) {
  const double dk = static_cast<double>(k);
  auto h = [&](double t) {
    const double w1 = std::exp(t);
    return dk - w1 * d_sum(w1 + v, n);
  };
  double t0 = std::log(1e-6);
  double t1 = std::log(1e6);
  for (int expand = 0; expand < 8; ++expand) {
    const double f0 = h(t0);
    const double f1 = h(t1);
    if (f0 > 0.0 && f1 <= 0.0) {
      Root r = solve_bracketed(h, t0, t1, f0, f1);
      r.x = std::exp(r.x);
      return r;
    }
    if (f0 <= 0.0) t0 -= std::log(1e3);
    if (f1 > 0.0) t1 += std::log(1e3);
  }
  throw NonConvergence("mle: no bracket for the w1 score equation");
}

}  // namespace

TrialSequence::TrialSequence(std::vector<std::uint8_t> b) : bits(std::move(b)) {
  for (auto bit : bits) {
    if (bit > 1) throw DomainError("TrialSequence: bits must be 0 or 1");
  }
}

std::size_t TrialSequence::k() const noexcept {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

Constraint Constraint::w2_fixed(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) throw DomainError("Constraint: w2 must be finite and >= 0");
  return Constraint(Kind::w2_fixed, value);
}

std::string Constraint::describe() const {
  switch (kind_) {
    case Kind::free:
      return "free";
    case Kind::w_eq_one:
      return "w=1";
    case Kind::w2_fixed: {
      std::ostringstream os;
      os.precision(17);
      os << "w2=" << value_;
      return os.str();
    }
  }
  return "free";
}

Constraint Constraint::parse(const std::string& text) {
  if (text == "free") return free();
  if (text == "w=1") return w_eq_one();
  if (text.rfind("w2=", 0) == 0) {
    const std::string rest = text.substr(3);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      throw DomainError("constraint: cannot parse '" + text + "'");
    }
    if (used != rest.size()) throw DomainError("constraint: cannot parse '" + text + "'");
    return w2_fixed(v);
  }
  throw DomainError("constraint: expected free, w=1 or w2=<value>, got '" + text + "'");
}

std::string to_string(Boundary b) {
  switch (b) {
    case Boundary::none:
      return "none";
    case Boundary::w1_zero:
      return "w1_zero";
    case Boundary::w1_infinite:
      return "w1_infinite";
    case Boundary::w2_zero:
      return "w2_zero";
    case Boundary::w_infinite:
      return "w_infinite";
  }
  return "none";
}

Eigen::VectorXd EstimateReport::standard_errors() const {
  if (!covariance) return {};
  return covariance->diagonal().cwiseMax(0.0).cwiseSqrt();
}

double log_likelihood_sequence(const Weights& weights, const TrialSequence& seq) {
  const double w1 = weights.w1();
  const double w = weights.w();
  CompensatedSum acc;
  for (std::size_t m = 0; m < seq.n(); ++m) {
    const double success = w1 / (w + static_cast<double>(m));
    if (seq.bits[m] == 1) {
      acc.add(std::log(success));
    } else {
      if (success >= 1.0) return -kInf;
      acc.add(std::log1p(-success));
    }
  }
  return acc.value();
}

Eigen::Vector2d score_sequence(const Weights& weights, const TrialSequence& seq) {
  const double d = d_sum(weights.w(), seq.n());
  CompensatedSum fail;
  for (std::size_t m = 0; m < seq.n(); ++m) {
    if (seq.bits[m] == 0) fail.add(1.0 / (weights.w2() + static_cast<double>(m)));
  }
  return {static_cast<double>(seq.k()) / weights.w1() - d, fail.value() - d};
}

EstimateReport mle_ewens(std::size_t n, std::size_t k) {
  if (n < 2) throw Infeasible("mle: need at least two trials");
  if (k == 0 || k > n) throw DomainError("mle_ewens: need 1 <= k <= n");
  const Constraint c = Constraint::w2_fixed(0.0);
  const double dk = static_cast<double>(k);
  auto kernel = [&](double w1) { return dk * std::log(w1) - log_rising_factorial(w1, n); };
  if (k == 1) {
    return boundary_report(c, Boundary::w1_zero, 0.0, 0.0, -std::lgamma(static_cast<double>(n)));
  }
  if (k == n) return boundary_report(c, Boundary::w1_infinite, kInf, 0.0, 0.0);
  const Root root = solve_w2_fixed(n, k, 0.0);
  EstimateReport r;
  r.constraint = c;
  r.w1_hat = root.x;
  r.w2_hat = 0.0;
  r.iterations = root.iterations;
  r.loglik = kernel(root.x);
  r.score = Eigen::VectorXd::Constant(1, dk / root.x - d_sum(root.x, n));
  r.converged = root.converged && std::abs(r.score[0]) <= kScoreTolerance;
  auto f = [&](const Eigen::VectorXd& x) { return x[0] > 0.0 ? kernel(x[0]) : kNaN; };
  r.covariance = covariance_from_hessian(numeric_hessian(f, Eigen::VectorXd::Constant(1, root.x)));
  return r;
}

EstimateReport mle_sequence(const TrialSequence& seq, Constraint constraint) {
  const std::size_t n = seq.n();
  const std::size_t k = seq.k();
  if (n < 2) throw Infeasible("mle: need at least two trials");
  const double dk = static_cast<double>(k);

  auto loglik_at = [&](double w1, double w2) {
    const auto wt = try_weights(w1, w2);
    return wt ? log_likelihood_sequence(*wt, seq) : kNaN;
  };

  switch (constraint.kind()) {
    case Constraint::Kind::w2_fixed: {
      const double v = constraint.w2_value();
      if (v == 0.0 && seq.bits[0] == 0) {
        throw Infeasible("mle: w2=0 makes a failure at the first trial impossible");
      }
      if (k == 0) return boundary_report(constraint, Boundary::w1_zero, 0.0, v, 0.0);
      if (k == n) return boundary_report(constraint, Boundary::w1_infinite, kInf, v, 0.0);
      if (v == 0.0 && k == 1) return boundary_report(constraint, Boundary::w1_zero, 0.0, 0.0, 0.0);
      const Root root = solve_w2_fixed(n, k, v);
      EstimateReport r;
      r.constraint = constraint;
      r.w1_hat = root.x;
      r.w2_hat = v;
      r.iterations = root.iterations;
      r.loglik = loglik_at(root.x, v);
      r.score = Eigen::VectorXd::Constant(1, dk / root.x - d_sum(root.x + v, n));
      r.converged = root.converged && std::abs(r.score[0]) <= kScoreTolerance;
      auto f = [&](const Eigen::VectorXd& x) { return loglik_at(x[0], v); };
      r.covariance = covariance_from_hessian(numeric_hessian(f, Eigen::VectorXd::Constant(1, root.x)));
      return r;
    }

    case Constraint::Kind::w_eq_one: {
      if (k == 0) return boundary_report(constraint, Boundary::w1_zero, 0.0, 1.0, 0.0);
      // Score in w1 with w2 = 1 - w1: k/w1 - sum over failures at trial m of 1/(m - w1).
      auto score = [&](double w1) {
        CompensatedSum fail;
        for (std::size_t m = 1; m <= n; ++m) {
          if (seq.bits[m - 1] == 0) fail.add(1.0 / (static_cast<double>(m) - w1));
        }
        return dk / w1 - fail.value();
      };
      const double hi = std::nextafter(1.0, 0.0);
      const double s_hi = score(hi);
      if (s_hi > 0.0) {
        EstimateReport r = boundary_report(constraint, Boundary::w2_zero, 1.0, 0.0, loglik_at(1.0, 0.0));
        r.score = Eigen::VectorXd::Constant(1, s_hi);
        return r;
      }
      const double lo = 1e-300;
      const Root root = solve_bracketed(score, lo, hi, score(lo), s_hi);
      EstimateReport r;
      r.constraint = constraint;
      r.w1_hat = root.x;
      r.w2_hat = 1.0 - root.x;
      r.iterations = root.iterations;
      r.loglik = loglik_at(root.x, 1.0 - root.x);
      r.score = Eigen::VectorXd::Constant(1, score(root.x));
      r.converged = root.converged && std::abs(r.score[0]) <= kScoreTolerance;
      auto f = [&](const Eigen::VectorXd& x) { return loglik_at(x[0], 1.0 - x[0]); };
      r.covariance = covariance_from_hessian(numeric_hessian(f, Eigen::VectorXd::Constant(1, root.x)));
      return r;
    }

    case Constraint::Kind::free:
      break;
  }

  if (k == 0) return boundary_report(constraint, Boundary::w1_zero, 0.0, kNaN, 0.0);
  if (k == n) return boundary_report(constraint, Boundary::w1_infinite, kInf, 0.0, 0.0);

  std::vector<double> failures;
  for (std::size_t m = 0; m < n; ++m) {
    if (seq.bits[m] == 0) failures.push_back(static_cast<double>(m));
  }
  // Profile: w1(w) = k / D(w) from the w1 score, w2(w) = w - w1(w) > 0.
  auto profile_w1 = [&](double w) { return dk / d_sum(w, n); };
  auto g = [&](double t) {
    const double w = std::exp(t);
    const double w2 = w - profile_w1(w);
    if (!(w2 > 0.0)) return kNaN;
    CompensatedSum fail;
    for (double m : failures) fail.add(1.0 / (w2 + m));
    return fail.value() - d_sum(w, n);
  };

  auto [outcome, bracket] = scan(g, std::log(1e-6), std::log(1e6), 240);
  if (outcome == ScanOutcome::positive_throughout) {
    std::tie(outcome, bracket) = scan(g, std::log(1e6), std::log(1e12), 120);
  }
  if (outcome == ScanOutcome::positive_throughout) {
    return boundary_report(constraint, Boundary::w_infinite, kInf, kInf, kNaN);
  }
  if (outcome == ScanOutcome::negative_at_start) {
    // The profile decreases toward w2 = 0: maximum on the Ewens edge.
    if (seq.bits[0] == 0) throw NonConvergence("mle: inconsistent profile near w2 = 0");
    EstimateReport r = k == 1 ? boundary_report(constraint, Boundary::w1_zero, 0.0, 0.0, 0.0)
                              : mle_sequence(seq, Constraint::w2_fixed(0.0));
    r.constraint = constraint;
    r.boundary = k == 1 ? Boundary::w1_zero : Boundary::w2_zero;
    r.covariance.reset();
    if (r.w1_hat > 0.0) r.score = score_sequence(Weights(r.w1_hat, 0.0), seq);
    return r;
  }

  const Root root = solve_bracketed(g, bracket.lo, bracket.hi, bracket.f_lo, bracket.f_hi);
  const double w = std::exp(root.x);
  EstimateReport r;
  r.constraint = constraint;
  r.w1_hat = profile_w1(w);
  r.w2_hat = w - r.w1_hat;
  r.iterations = root.iterations;
  r.loglik = loglik_at(r.w1_hat, r.w2_hat);
  r.score = score_sequence(Weights(r.w1_hat, r.w2_hat), seq);
  r.converged = root.converged && r.score.cwiseAbs().maxCoeff() <= kScoreTolerance;
  auto f = [&](const Eigen::VectorXd& x) { return loglik_at(x[0], x[1]); };
  r.covariance = covariance_from_hessian(numeric_hessian(f, Eigen::Vector2d(r.w1_hat, r.w2_hat)));
  return r;
}

namespace {

using Histogram = std::map<std::size_t, double>;

Histogram histogram_of(const std::vector<std::size_t>& samples) {
  Histogram h;
  for (std::size_t s : samples) {
    if (s == 0) throw DomainError("first-success samples must be >= 1");
    h[s] += 1.0;
  }
  return h;
}

// sum_l (Psi(w + n_l) - Psi(w)).
double e_sum(const Histogram& h, double w) {
  CompensatedSum acc;
  for (const auto& [value, count] : h) acc.add(count * d_sum(w, value));
  return acc.value();
}

// sum_l (Psi(w2 + n_l - 1) - Psi(w2)).
double f_sum(const Histogram& h, double w2) {
  CompensatedSum acc;
  for (const auto& [value, count] : h) {
    if (value > 1) acc.add(count * d_sum(w2, value - 1));
  }
  return acc.value();
}

double loglik_histogram(const Histogram& h, double w1, double w2) {
  const double w = w1 + w2;
  CompensatedSum acc;
  for (const auto& [value, count] : h) {
    // log P(K_1+ = n) = log(w1/(w+n-1)) + log([w2]_{n-1}/[w]_{n-1})
    const double n1 = static_cast<double>(value - 1);
    double term = std::log(w1 / (w + n1));
    if (value > 1) term += w2 > 0.0 ? log_rising_ratio(w2, w, value - 1) : -kInf;
    acc.add(count * term);
  }
  return acc.value();
}

Eigen::Vector2d score_histogram(const Histogram& h, double total, double w1, double w2) {
  const double e = e_sum(h, w1 + w2);
  return {total / w1 - e, f_sum(h, w2) - e};
}

}  // namespace

double log_likelihood_first_success(const Weights& weights, const std::vector<std::size_t>& samples) {
  return loglik_histogram(histogram_of(samples), weights.w1(), weights.w2());
}

Eigen::Vector2d score_first_success(const Weights& weights, const std::vector<std::size_t>& samples) {
  if (!(weights.w2() > 0.0)) throw DomainError("score_first_success: requires w2 > 0");
  return score_histogram(histogram_of(samples), static_cast<double>(samples.size()), weights.w1(), weights.w2());
}

EstimateReport mle_first_success(const std::vector<std::size_t>& samples) {
  if (samples.size() < 2) throw Infeasible("mle_first_success: need at least two samples");
  const Histogram h = histogram_of(samples);
  const double total = static_cast<double>(samples.size());
  const Constraint c = Constraint::free();
  if (h.size() == 1 && h.begin()->first == 1) {
    return boundary_report(c, Boundary::w2_zero, kNaN, 0.0, 0.0);
  }

  auto profile_w1 = [&](double w) { return total / e_sum(h, w); };
  auto g = [&](double t) {
    const double w = std::exp(t);
    const double w2 = w - profile_w1(w);
    if (!(w2 > 0.0)) return kNaN;
    return f_sum(h, w2) - e_sum(h, w);
  };
  auto [outcome, bracket] = scan(g, std::log(1e-6), std::log(1e6), 240);
  if (outcome == ScanOutcome::positive_throughout) {
    std::tie(outcome, bracket) = scan(g, std::log(1e6), std::log(1e12), 120);
  }
  if (outcome == ScanOutcome::positive_throughout) {
    return boundary_report(c, Boundary::w_infinite, kInf, kInf, kNaN);
  }
  if (outcome == ScanOutcome::negative_at_start) {
    throw NonConvergence("mle_first_success: profile score not positive near w2 = 0");
  }
  const Root root = solve_bracketed(g, bracket.lo, bracket.hi, bracket.f_lo, bracket.f_hi);
  const double w = std::exp(root.x);
  EstimateReport r;
  r.constraint = c;
  r.w1_hat = profile_w1(w);
  r.w2_hat = w - r.w1_hat;
  r.iterations = root.iterations;
  r.loglik = loglik_histogram(h, r.w1_hat, r.w2_hat);
  r.score = score_histogram(h, total, r.w1_hat, r.w2_hat);
  r.converged = root.converged && r.score.cwiseAbs().maxCoeff() <= kScoreTolerance;
  // The likelihood involves log-gamma values of the sample size, so the
  // Hessian is differenced from the analytic score rather than the loglik.
  auto grad = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    if (!(x[0] > 0.0 && x[1] > 0.0)) return Eigen::Vector2d::Constant(kNaN);
    return score_histogram(h, total, x[0], x[1]);
  };
  r.covariance = covariance_from_hessian(gradient_hessian(grad, Eigen::Vector2d(r.w1_hat, r.w2_hat)));
  return r;
}

Weights method_of_moments_first_success(double mean, double variance) {
  if (!std::isfinite(mean) || !(mean > 1.0)) {
    throw Infeasible("method_of_moments: the mean of K_1+ must exceed 1");
  }
  const double floor = mean * (mean - 1.0);
  if (!std::isfinite(variance) || !(variance > floor)) {
    throw Infeasible("method_of_moments: variance must exceed mean (mean - 1)");
  }
  const double w1 = 2.0 * variance / (variance - floor);
  const double w2 = (mean - 1.0) * (w1 - 1.0);
  return Weights(w1, w2);
}

}  // namespace harmonic
