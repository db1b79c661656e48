// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "harmonic/cli.hpp"
#include "harmonic/disaster_chain.hpp"
#include "harmonic/estimation.hpp"
#include "harmonic/first_success.hpp"
#include "harmonic/numkernel.hpp"
#include "harmonic/passage_times.hpp"
#include "harmonic/simulate.hpp"
#include "harmonic/species_sampling.hpp"
#include "harmonic/success_counts.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#ifndef HARMONIC_CLI_PATH
#define HARMONIC_CLI_PATH "harmonic"
#endif

using namespace harmonic;

namespace {

const std::array<double, 4> kGrid = {0.3, 1.0, 1.5, 2.6};

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    notes.emplace_back(std::string(ok ? "" : "!") + buf);
    pass = pass && ok;
  }
  void note(const std::string& text) { notes.push_back("(" + text + ")"); }
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

double max_abs_diff(const FinitePmf& a, const FinitePmf& b) {
  double worst = 0.0;
  const std::size_t end = std::max(a.end(), b.end());
  for (std::size_t x = 0; x < end; ++x) worst = std::max(worst, std::abs(a.at(x) - b.at(x)));
  return worst;
}

struct Stats {
  double mean = 0.0;
  double se = 0.0;
};

template <class Range>
Stats stats(const Range& xs) {
  const auto s = oracle::sample_stats(xs);
  return {s.mean, s.se};
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome out;
  double worst = 0.0;
  for (double w1 : kGrid) {
    for (double w2 : kGrid) {
      for (int n = 0; n <= 12; ++n) {
        const FinitePmf rec = pmf_successes(AlphaModel(Weights(w1, w2)), static_cast<std::size_t>(n));
        const std::vector<double> brute = oracle::success_law(w1, w2, n);
        for (int k = 0; k <= n; ++k) worst = std::max(worst, std::abs(rec.at(k) - brute[k]));
      }
    }
  }
  out.require(worst <= 1e-12, "max|recursion - enumeration| = %.3g (<= 1e-12)", worst);
  return out;
}

Outcome criterion2() {
  Outcome out;
  std::vector<double> w2s(kGrid.begin(), kGrid.end());
  w2s.push_back(0.0);
  double triple = 0.0;
  for (double w1 : kGrid) {
    for (double w2 : w2s) {
      const Weights wt(w1, w2);
      for (std::size_t n = 0; n <= 20; ++n) {
        const FinitePmf rec = pmf_successes(AlphaModel(wt), n);
        const FinitePmf stir = pmf_successes_closed_form(wt, n);
        const FinitePmf gen = pmf_successes_generalized_stirling(wt, n);
        triple = std::max({triple, max_abs_diff(rec, stir), max_abs_diff(rec, gen), max_abs_diff(stir, gen)});
      }
    }
  }
  out.require(triple <= 1e-10, "triple-path max diff n<=20 = %.3g (<= 1e-10)", triple);

  double dob = 0.0;
  for (double alpha : {0.25, 0.5, 1.0}) {
    for (double w1 : kGrid) {
      for (double w2 : w2s) {
        const AlphaModel model(Weights(w1, w2), alpha);
        for (std::size_t n = 0; n <= 15; ++n) {
          dob = std::max(dob, max_abs_diff(pmf_successes(model, n), pmf_successes_dobinski(model, n)));
        }
      }
    }
  }
  out.require(dob <= 1e-9, "Dobinski vs recursion n<=15 = %.3g (<= 1e-9)", dob);
  return out;
}

Outcome criterion3() {
  Outcome out;
  // Exact rational recursion for (1, 0) against |s(n,k)|/n! and the cycle counts.
  const StirlingTable table = stirling_first_unsigned(10);
  std::vector<Rational> pi{Rational(1)};
  bool exact_ok = true;
  double worst_lib = 0.0;
  for (std::size_t n = 0; n <= 10; ++n) {
    if (n > 0) {
      std::vector<Rational> next(n + 1, Rational(0));
      const long long m = static_cast<long long>(n - 1);
      for (std::size_t k = 0; k < n; ++k) {
        next[k + 1] += pi[k] * Rational(1, 1 + m);
        next[k] += pi[k] * Rational(m, 1 + m);
      }
      pi = std::move(next);
    }
    BigInt fact(1);
    for (std::size_t i = 2; i <= n; ++i) fact *= static_cast<long long>(i);
    const std::vector<long long> cycles = n >= 1 ? oracle::cycle_counts(static_cast<int>(n)) : std::vector<long long>{1};
    const FinitePmf lib = pmf_successes(AlphaModel(Weights(1, 0)), n);
    for (std::size_t k = 0; k <= n; ++k) {
      const Rational target(table.at(n, k), fact);
      exact_ok = exact_ok && pi[k] == target && Rational(BigInt(cycles[k]), fact) == target;
      worst_lib = std::max(worst_lib, std::abs(lib.at(k) - to_double(target)));
    }
  }
  out.require(exact_ok, "rational recursion == |s(n,k)|/n! == cycle counts/n! for n<=10");
  out.require(worst_lib <= 1e-15, "double pmf vs exact = %.3g (<= 1e-15)", worst_lib);

  const TriangularTable t = passage_table(Weights(1, 0), 2, 100);
  double worst = 0.0;
  double worst_ewens = 0.0;
  for (std::size_t n = 2; n <= 100; ++n) {
    const double target = 1.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
    worst = std::max(worst, std::abs(t.at(n, 2) - target));
    worst_ewens = std::max(worst_ewens, std::abs(passage_pmf_ewens(1.0, 2, n) - target));
  }
  out.require(worst <= 1e-14, "P(K_2+=n) table vs 1/(n(n-1)) = %.3g (<= 1e-14)", worst);
  out.require(worst_ewens <= 1e-14, "P(K_2+=n) Stirling form = %.3g (<= 1e-14)", worst_ewens);
  return out;
}

Outcome criterion4() {
  Outcome out;
  bool sandwich = true;
  bool shrinking = true;
  bool consistent = true;
  int cases = 0;
  for (double w1 : kGrid) {
    for (double w2 : kGrid) {
      const Weights wt(w1, w2);
      double prev_tv = 2.0;
      double prev_ratio = 2.0;
      for (std::size_t n : {10, 100, 1000}) {
        const PoissonBoundReport r = poisson_bounds(wt, n);
        const double ratio = mean_variance_gap(wt, n) / r.mu_n;
        sandwich = sandwich && r.tv_lower <= r.tv_exact && r.tv_exact <= r.tv_upper;
        shrinking = shrinking && r.tv_exact < prev_tv && ratio < prev_ratio;
        // The upper bound is itself at most (mu - sigma^2)/mu, so the exact
        // distance is squeezed to 0 along with the ratio.
        consistent = consistent && r.tv_exact <= ratio;
        prev_tv = r.tv_exact;
        prev_ratio = ratio;
        ++cases;
      }
    }
  }
  out.require(sandwich, "tv_lower <= tv_exact <= tv_upper in %d cases", cases);
  out.require(shrinking, "tv_exact and (mu-sigma^2)/mu decrease along n = 10, 100, 1000");
  out.require(consistent, "tv_exact <= (mu-sigma^2)/mu throughout");
  const PoissonBoundReport worst = poisson_bounds(Weights(2.6, 0.3), 1000);
  out.note(fmt("at (2.6,0.3), n=1000: tv_exact=%.4g, ratio=%.4g", worst.tv_exact,
               mean_variance_gap(Weights(2.6, 0.3), 1000) / worst.mu_n));
  return out;
}

Outcome criterion5() {
  Outcome out;
  double worst = 0.0;
  bool certified = true;
  for (std::size_t l = 1; l <= 4; ++l) {
    const GapLaw g = gap_pmf(Weights(1, 0), l + 1, 30);
    certified = certified && g.certified;
    for (std::size_t i = 0; i <= 30; ++i) worst = std::max(worst, std::abs(g.tail(i) - gap_tail_neuts(l, i)));
  }
  out.require(worst <= 1e-10, "max|gap tail - Neuts tail| l<=4, i<=30 = %.3g (<= 1e-10)", worst);
  out.note(certified ? "gap laws certified" : "some gap laws uncertified");
  return out;
}

Outcome criterion6() {
  Outcome out;
  const std::size_t N = 2000;
  const StirlingTable table = stirling_first_unsigned(N, StirlingOptions{N, 3});
  for (double w1 : {0.5, 1.0, 2.0}) {
    const FinitePmf s_law = pmf_successes(AlphaModel(Weights(w1, 0)), N + 1);
    const double mu = mean_successes(AlphaModel(Weights(w1, 0)), N + 1);
    for (std::size_t l = 1; l <= 3; ++l) {
      CompensatedSum partial;
      for (std::size_t n = l; n <= N; ++n) partial.add(std::exp(table.log_at(n, l) - log_rising_factorial(w1 + 1.0, n)));
      const double limit = std::pow(w1, -static_cast<double>(l));
      const double gap = limit - partial.value();
      // Tail = w1^-l P(K_{l+1}+ > N+1) = w1^-l P(S_{N+1} <= l); Chernoff for
      // a sum of independent Bernoulli variables bounds the latter.
      const double ld = static_cast<double>(l);
      const double chernoff = limit * std::exp(-mu + ld * (1.0 + std::log(mu / ld)));
      double lower_tail = 0.0;
      for (std::size_t k = 0; k <= l; ++k) lower_tail += s_law.at(k);
      const double exact_tail = limit * lower_tail;
      out.require(gap >= -1e-12 * limit && gap <= chernoff,
                  "w1=%g l=%zu: w1^-l - partial = %.4g <= bound %.4g", w1, l, gap, chernoff);
      out.require(std::abs(gap - exact_tail) <= 1e-9 * limit, "w1=%g l=%zu: matches exact tail %.4g", w1, l,
                  exact_tail);
    }
  }
  return out;
}

Outcome criterion7() {
  Outcome out;
  double worst = 0.0;
  for (double w1 : {0.2, 0.5, 0.9}) {
    for (double z : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1.0}) {
      const double expect = z == 0.0 ? w1 : (1.0 - std::pow(1.0 - z, w1)) / z;
      worst = std::max(worst, std::abs(first_success::pgf(Weights(w1, 1.0 - w1), z) - expect));
    }
  }
  out.require(worst <= 1e-12, "Sibuya pgf max diff = %.3g (<= 1e-12)", worst);

  // Truncated sums of k P(K_1 = k) and k(k-1) P(K_1 = k) plus tail remainders
  // from summation by parts with T(k) = P(K_1 > k) ~ c (k+1)^-w1.
  const std::size_t cut = 1'000'000;
  for (const Weights wt : {Weights(2.5, 1.0), Weights(3.5, 2.0), Weights(4.5, 0.7)}) {
    const double w1 = wt.w1();
    double p = first_success::pmf(wt, 0);
    CompensatedSum m1;
    CompensatedSum m2;
    for (std::size_t k = 1; k <= cut; ++k) {
      p *= (wt.w2() + static_cast<double>(k) - 1.0) / (wt.w() + static_cast<double>(k));
      const double kd = static_cast<double>(k);
      m1.add(kd * p);
      m2.add(kd * (kd - 1.0) * p);
    }
    // P(K_1 > cut) = P(K_1+ > cut + 1).
    const double tail = first_success::survival(wt, cut + 1);
    const double cd = static_cast<double>(cut);
    const double c = tail * std::pow(cd + 1.0, w1);
    const double y = cd + 1.5;
    const double r1 = (cd + 1.0) * tail + c * std::pow(y, 1.0 - w1) / (w1 - 1.0);
    const double r2 = (cd + 1.0) * cd * tail +
                      2.0 * c * (std::pow(y, 2.0 - w1) / (w1 - 2.0) - std::pow(y, 1.0 - w1) / (w1 - 1.0));
    const double mean = m1.value() + r1;
    const double fact2 = m2.value() + r2;
    const double var = fact2 + mean - mean * mean;
    const double mean_cf = wt.w2() / (w1 - 1.0);
    const double var_cf = first_success::variance(wt);
    const double var_formula = w1 * (wt.w() - 1.0) * mean_cf / ((w1 - 1.0) * (w1 - 2.0));
    const double e1 = std::abs(mean - mean_cf) / mean_cf;
    const double e2 = std::abs(var - var_cf) / var_cf;
    out.require(e1 <= 1e-6, "(%g,%g) mean rel err %.3g", w1, wt.w2(), e1);
    out.require(e2 <= 1e-6 && std::abs(var_cf - var_formula) <= 1e-12 * var_formula, "(%g,%g) variance rel err %.3g",
                w1, wt.w2(), e2);
  }
  return out;
}

Outcome criterion8() {
  Outcome out;
  const EstimateReport exact = mle_sequence(TrialSequence({1, 1, 0}), Constraint::w2_fixed(0.0));
  out.require(std::abs(exact.w1_hat - std::sqrt(2.0)) <= 1e-9 && exact.converged,
              "w2=0, n=3, k=2: w1_hat - sqrt2 = %.3g", exact.w1_hat - std::sqrt(2.0));

  bool flagged = true;
  int runs = 0;
  for (std::size_t n : {2, 3, 10, 200}) {
    const TrialSequence zeros(std::vector<std::uint8_t>(n, 0));
    const TrialSequence ones(std::vector<std::uint8_t>(n, 1));
    for (const Constraint& c : {Constraint::free(), Constraint::w_eq_one(), Constraint::w2_fixed(0.5),
                                Constraint::w2_fixed(0.0)}) {
      for (const TrialSequence* seq : {&zeros, &ones}) {
        ++runs;
        try {
          const EstimateReport r = mle_sequence(*seq, c);
          flagged = flagged && r.boundary != Boundary::none && !r.covariance;
        } catch (const Infeasible&) {
          // All zeros under w2 = 0 contradicts the forced first success.
          flagged = flagged && seq == &zeros && c.kind() == Constraint::Kind::w2_fixed && c.w2_value() == 0.0;
        } catch (...) {
          flagged = false;
        }
      }
    }
  }
  out.require(flagged, "k=0 and k=n flagged without crash in %d runs", runs);

  const TrialSequence seq = sample_trials(AlphaModel(Weights(1.5, 2.0)), 100'000, RngSpec{20240601, 0});
  const EstimateReport r = mle_sequence(seq, Constraint::free());
  const Eigen::VectorXd se = r.standard_errors();
  const bool ok = r.converged && se.size() == 2 && oracle::within_se(r.w1_hat, 1.5, se[0]) &&
                  oracle::within_se(r.w2_hat, 2.0, se[1]);
  out.require(ok, "n=1e5 round trip: w1=%.4f (se %.3f), w2=%.4f (se %.3f)", r.w1_hat, se.size() ? se[0] : NAN,
              r.w2_hat, se.size() > 1 ? se[1] : NAN);
  return out;
}

Outcome criterion9() {
  Outcome out;
  struct Row {
    double w2, alpha, w1;
    ChainClass expect;
  };
  const std::vector<Row> grid = {
      {0.0, 0.5, 1.0, ChainClass::absorbing_certain_extinction},
      {0.0, 1.0, 1.0, ChainClass::absorbing_certain_extinction},
      {0.0, 2.0, 1.0, ChainClass::absorbing_possible_escape},
      {1.0, 2.0, 1.0, ChainClass::transient},
      {1.0, 0.5, 1.0, ChainClass::positive_recurrent},
      {1.0, 1.0, 0.5, ChainClass::null_recurrent},
      {1.0, 1.0, 1.0, ChainClass::null_recurrent},
      {1.0, 1.0, 2.0, ChainClass::positive_recurrent},
      {2.0, 0.8, 0.3, ChainClass::positive_recurrent},
  };
  int right = 0;
  for (const Row& row : grid) right += classify(ChainSpec(Weights(row.w1, row.w2), row.alpha)) == row.expect;
  out.require(right == static_cast<int>(grid.size()), "classification %d/%zu", right, grid.size());

  const ChainSpec crit(Weights(2, 1), 1.0);
  const FinitePmf pi = invariant_measure(crit, 2000);
  double worst = 0.0;
  for (std::size_t n = 0; n < pi.end(); ++n) {
    worst = std::max(worst, std::abs(pi.at(n) - 1.0 / ((n + 1.0) * (n + 2.0))));
  }
  const double residual = stationarity_residual(crit, pi);
  out.require(worst <= 1e-13, "pi_n vs 1/((n+1)(n+2)) = %.3g (<= 1e-13)", worst);
  out.require(residual <= 1e-12, "||pi P - pi||_inf = %.3g (<= 1e-12)", residual);

  const double tail = overcrossing_tail(crit, 0, 1, 2);
  const double ulps = std::abs(tail - 5.0 / 6.0) / (std::nextafter(5.0 / 6.0, 1.0) - 5.0 / 6.0);
  out.require(ulps <= 1.0, "P_0(T_1(1) > 2) = %.17g vs 5/6 (%.0f ulp)", tail, ulps);

  const std::size_t level = 6;
  const double solve = expected_overcrossing(crit, 0, level);
  const double dense = expected_overcrossing_dense(crit, 0, level);
  // E T = sum_{l >= 0} P(T > l); the tail decays geometrically at the spectral radius.
  CompensatedSum tail_sum;
  double term = 1.0;
  std::size_t l = 0;
  for (; term > 1e-18; ++l) {
    term = overcrossing_tail(crit, 0, level, l);
    tail_sum.add(term);
  }
  const double rho = spectral_radius(crit, level);
  const double remainder = term * rho / (1.0 - rho);
  const double by_tail = tail_sum.value() + remainder;
  out.note(fmt("tail sum over %zu steps, rho=%.15g", l, rho));
  out.require(std::abs(solve - by_tail) <= 1e-10 * solve && std::abs(solve - dense) <= 1e-10 * solve,
              "E_0 T_1(%zu): solve %.12g, tail sum %.12g, dense %.12g", level, solve, by_tail, dense);

  Rng rng(RngSpec{4242, 0});
  std::vector<double> times;
  times.reserve(100'000);
  for (int rep = 0; rep < 100'000; ++rep) times.push_back(static_cast<double>(*sample_overcrossing_time(crit, 0, level, rng)));
  const Stats s = stats(times);
  out.require(oracle::within_se(s.mean, solve, s.se), "Monte Carlo 1e5 paths: %.4f +- %.4f vs %.4f", s.mean, s.se,
              solve);
  return out;
}

Outcome criterion10() {
  Outcome out;
  double worst_sum = 0.0;
  for (double alpha : {0.0, 0.3, 0.7, 1.0}) {
    for (const Weights wt : {Weights(1.3, 0.8), Weights(0.4, 0.0), Weights(2.6, 1.5)}) {
      for (std::size_t n = 1; n <= 8; ++n) {
        CompensatedSum total;
        for (const SampleConfiguration& cfg : enumerate_configurations(n)) total.add(dtg_joint(AlphaModel(wt, alpha), cfg));
        worst_sum = std::max(worst_sum, std::abs(total.value() - 1.0));
      }
    }
  }
  out.require(worst_sum <= 1e-10, "dtg_joint totals n<=8: max |sum-1| = %.3g", worst_sum);

  double worst_chain = 0.0;
  for (double alpha : {0.0, 0.4, 1.0}) {
    const AlphaModel model(Weights(1.3, 0.8), alpha);
    for (std::size_t n = 1; n <= 8; ++n) {
      std::map<std::pair<std::size_t, std::size_t>, double> joint;
      for (const SampleConfiguration& cfg : enumerate_configurations(n)) joint[{cfg.n0, cfg.k()}] += dtg_joint(model, cfg);
      for (std::size_t n0 = 0; n0 <= n; ++n0) {
        double marginal = 0.0;
        for (std::size_t k = 0; k <= n - n0; ++k) {
          const double r = reservoir_success_joint(model, n, n0, k);
          worst_chain = std::max(worst_chain, std::abs(r - joint[{n0, k}]));
          marginal += r;
        }
        worst_chain = std::max(worst_chain, std::abs(marginal - reservoir_marginal(model.weights(), n, n0)));
      }
    }
  }
  out.require(worst_chain <= 1e-10, "dtg -> joint -> beta-binomial max diff = %.3g", worst_chain);

  // Sequential sampler at n = 6: every configuration's frequency within 4 SE.
  const AlphaModel model(Weights(1.3, 0.8), 0.4);
  const std::size_t reps = 1'000'000;
  std::map<std::pair<std::size_t, std::vector<std::size_t>>, std::size_t> counts;
  Rng rng(RngSpec{606, 0});
  for (std::size_t r = 0; r < reps; ++r) {
    const SampleConfiguration cfg = sample_species_sequence(model, 6, rng);
    ++counts[{cfg.n0, cfg.parts}];
  }
  int bad = 0;
  double worst_z = 0.0;
  const auto configs = enumerate_configurations(6);
  for (const SampleConfiguration& cfg : configs) {
    const double p = dtg_joint(model, cfg);
    const double freq = static_cast<double>(counts[{cfg.n0, cfg.parts}]) / static_cast<double>(reps);
    const double se = std::sqrt(std::max(p * (1.0 - p), 1e-300) / static_cast<double>(reps));
    const double z = std::abs(freq - p) / se;
    worst_z = std::max(worst_z, z);
    bad += z > 4.0;
  }
  out.require(bad == 0, "sampler vs dtg_joint, %zu configurations: max |z| = %.2f", configs.size(), worst_z);

  const Weights wt(1.5, 2.0);
  Rng beta_rng(RngSpec{1010, 0});
  std::vector<double> ratios;
  for (int r = 0; r < 1000; ++r) {
    const TrialSequence seq = sample_trials(AlphaModel(wt, 1.0), 10'000, beta_rng);
    ratios.push_back(static_cast<double>(seq.k()) / 1e4);
  }
  const Stats s = stats(ratios);
  out.require(oracle::within_se(s.mean, wt.w1() / wt.w(), s.se), "alpha=1 S_n/n: %.5f +- %.5f vs w1/w = %.5f", s.mean,
              s.se, wt.w1() / wt.w());
  return out;
}

Outcome criterion11() {
  Outcome out;
  const Weights wt(1.0, 1.0);
  const std::size_t n = 10'000;
  {
    const double a = 0.5;
    const double scale = wt.w1() * std::pow(static_cast<double>(n), 1.0 - a) / (1.0 - a);
    Rng rng(RngSpec{1111, 0});
    std::vector<double> ratio;
    for (int r = 0; r < 1000; ++r) {
      ratio.push_back(static_cast<double>(sample_power_model(wt, a, n, rng).k()) / scale);
    }
    const Stats s = stats(ratio);
    const double exact = power_model_mean(wt, a, n) / scale;
    out.require(oracle::within_se(s.mean, 1.0, s.se), "a=0.5: ratio %.5f +- %.5f vs 1 (%.1f SE)", s.mean, s.se,
                (s.mean - 1.0) / s.se);
    out.note(fmt("exact finite-n mean ratio %.5f, sample within %.1f SE of it", exact, (s.mean - exact) / s.se));
  }
  {
    const double a = 2.0;
    const SeriesValue limit = power_model_mean_limit(wt, a);
    Rng rng(RngSpec{2222, 0});
    std::vector<double> sn;
    for (int r = 0; r < 1000; ++r) sn.push_back(static_cast<double>(sample_power_model(wt, a, n, rng).k()));
    const Stats s = stats(sn);
    out.require(oracle::within_se(s.mean, limit.value, s.se), "a=2: mean %.4f +- %.4f vs mu_inf %.6f", s.mean, s.se,
                limit.value);
  }
  return out;
}

struct Captured {
  int status = -1;
  std::string bytes;
};

Captured run_process(const std::string& args) {
  Captured c;
  const std::string cmd = std::string("\"") + HARMONIC_CLI_PATH + "\" " + args;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return c;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) c.bytes.append(buf, got);
  c.status = pclose(pipe);
  return c;
}

Captured run_inprocess(const std::string& args, const std::string& input = "") {
  std::vector<std::string> argv;
  std::istringstream split(args);
  for (std::string tok; split >> tok;) argv.push_back(tok);
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  Captured c;
  c.status = cli::run(argv, in, out, err);
  c.bytes = out.str();
  return c;
}

Outcome criterion12() {
  Outcome out;
  const std::vector<std::string> invocations = {
      "simulate trials --w1 1.5 --w2 2 --n 200 --reps 20 --seed 7",
      "simulate trials --w1 0.7 --w2 0 --alpha 0.4 --n 300 --reps 10 --seed 8 --stream 3",
      "simulate power --w1 1 --w2 1 --a 0.5 --n 500 --reps 10 --seed 9",
      "simulate first-success --w1 0.6 --w2 1.4 --reps 200 --seed 10",
      "simulate first-success --w1 0.2 --w2 3 --reps 50 --cap 1000 --seed 11",
      "simulate disaster --w1 2 --w2 1 --alpha 1 --steps 500 --start 0 --seed 12",
      "simulate species --w1 1.3 --w2 0.8 --alpha 0.4 --n 40 --reps 25 --seed 13",
      "simulate species --w1 1.3 --w2 0.8 --alpha 0.4 --n 40 --reps 25 --seed 13 --format json",
  };
  int identical = 0;
  for (const std::string& args : invocations) {
    const Captured a = run_process(args);
    const Captured b = run_process(args);
    const Captured c = run_inprocess(args);
    const Captured d = run_inprocess(args);
    const bool same = a.status == 0 && b.status == 0 && !a.bytes.empty() && a.bytes == b.bytes && c.status == 0 &&
                      c.bytes == d.bytes && c.bytes == a.bytes;
    identical += same;
    if (!same) out.note("differs: " + args);
  }
  out.require(identical == static_cast<int>(invocations.size()), "%d/%zu seeded invocations byte-identical",
              identical, invocations.size());

  // Simulated bits piped into the estimator, twice.
  const Captured bits = run_inprocess("simulate trials --w1 1.5 --w2 2 --n 5000 --seed 99");
  const Captured e1 = run_inprocess("estimate-seq --format json", bits.bytes);
  const Captured e2 = run_inprocess("estimate-seq --format json", bits.bytes);
  out.require(!e1.bytes.empty() && e1.status == e2.status && e1.bytes == e2.bytes,
              "simulate | estimate-seq reproducible (exit %d)", e1.status);
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"exhaustive-oracle equivalence", criterion1},
      {"triple-path pmf agreement", criterion2},
      {"special-case exactness", criterion3},
      {"Poisson sandwich", criterion4},
      {"Neuts-formula equivalence", criterion5},
      {"vertical identity", criterion6},
      {"Sibuya/Yule-Simon closed forms", criterion7},
      {"MLE exact case and round trip", criterion8},
      {"disaster chain", criterion9},
      {"species sampling", criterion10},
      {"power model", criterion11},
      {"determinism", criterion12},
  };
  const std::map<int, double> budget = {{1, 30.0}, {4, 10.0}, {9, 60.0}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, "threw: %s", e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (auto it = budget.find(id); it != budget.end()) {
      o.require(secs < it->second, "runtime %.2f s (< %.0f s)", secs, it->second);
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << criteria[i].first << " [" << fmt("%.2f", secs)
              << " s]\n";
    for (const std::string& line : o.notes) std::cout << "     " << line << "\n";
    std::cout.flush();
    failures += !o.pass;
  }
  std::cout << (failures == 0 ? "all criteria passed" : fmt("%d criteria failed", failures)) << "\n";
  return failures == 0 ? 0 : 1;
}
