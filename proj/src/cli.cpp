#include "harmonic/cli.hpp"

#include "harmonic/disaster_chain.hpp"
#include "harmonic/estimation.hpp"
#include "harmonic/first_success.hpp"
#include "harmonic/passage_times.hpp"
#include "harmonic/simulate.hpp"
#include "harmonic/species_sampling.hpp"
#include "harmonic/success_counts.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace harmonic::cli {

namespace {

using nlohmann::json;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// JSON has no inf/nan; those become null.
json jnum(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

struct Output {
  std::string format = "csv";
  std::string path;

  bool is_json() const { return format == "json"; }
};

// Comment lines carried by CSV output; become fields in JSON.
using Notes = std::vector<std::pair<std::string, json>>;

std::string note_text(const json& v) {
  if (v.is_number_float()) return num(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void write_pmf(std::ostream& os, const Output& o, const FinitePmf& pmf, const Notes& notes = {}) {
  if (o.is_json()) {
    json j;
    j["offset"] = pmf.offset;
    json probs = json::array();
    for (Eigen::Index i = 0; i < pmf.probs.size(); ++i) probs.push_back(jnum(pmf.probs[i]));
    j["probabilities"] = probs;
    j["deficit"] = jnum(pmf.deficit);
    for (const auto& [key, value] : notes) j[key] = value;
    os << j.dump(2) << '\n';
    return;
  }
  for (const auto& [key, value] : notes) os << "# " << key << '=' << note_text(value) << '\n';
  os << "index,probability\n";
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    os << pmf.offset + i << ',' << num(pmf.probs[static_cast<Eigen::Index>(i)]) << '\n';
  }
  if (pmf.deficit > 0.0 || std::abs(pmf.total() - 1.0) > 1e-9) os << "# deficit=" << num(pmf.deficit) << '\n';
}

void write_record(std::ostream& os, const Output& o, const json& record) {
  if (o.is_json()) {
    os << record.dump(2) << '\n';
    return;
  }
  os << "field,value\n";
  for (const auto& [key, value] : record.items()) {
    os << key << ',';
    if (value.is_number_float()) {
      os << num(value.get<double>());
    } else if (value.is_string()) {
      os << value.get<std::string>();
    } else if (value.is_null()) {
      os << "nan";
    } else {
      os << value.dump();
    }
    os << '\n';
  }
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(jnum(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json estimate_json(const EstimateReport& r) {
  json j;
  j["w1_hat"] = jnum(r.w1_hat);
  j["w2_hat"] = jnum(r.w2_hat);
  j["constraint"] = r.constraint.describe();
  j["loglik"] = jnum(r.loglik);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["boundary"] = to_string(r.boundary);
  json score = json::array();
  for (Eigen::Index i = 0; i < r.score.size(); ++i) score.push_back(jnum(r.score[i]));
  j["score"] = score;
  if (r.covariance) {
    j["covariance"] = matrix_json(*r.covariance);
    json se = json::array();
    const Eigen::VectorXd s = r.standard_errors();
    for (Eigen::Index i = 0; i < s.size(); ++i) se.push_back(jnum(s[i]));
    j["standard_errors"] = se;
  } else {
    j["covariance"] = nullptr;
    j["standard_errors"] = nullptr;
  }
  return j;
}

int estimate_exit(const EstimateReport& r) {
  if (r.boundary != Boundary::none) return kExitInfeasible;
  if (!r.converged) return kExitNonConvergence;
  return kExitOk;
}

// Whitespace-separated tokens; '#' starts a comment running to end of line.
std::vector<std::string> read_tokens(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  return tokens;
}

std::vector<std::string> read_input(const std::string& path, std::istream& in) {
  if (path.empty() || path == "-") return read_tokens(in);
  std::ifstream file(path);
  if (!file) throw DomainError("cannot open input file '" + path + "'");
  return read_tokens(file);
}

TrialSequence parse_bits(const std::vector<std::string>& tokens) {
  std::vector<std::uint8_t> bits;
  bits.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (t == "0") {
      bits.push_back(0);
    } else if (t == "1") {
      bits.push_back(1);
    } else {
      throw DomainError("bits input: expected 0 or 1, got '" + t + "'");
    }
  }
  return TrialSequence(std::move(bits));
}

std::vector<std::size_t> parse_times(const std::vector<std::string>& tokens) {
  std::vector<std::size_t> times;
  times.reserve(tokens.size());
  for (const auto& t : tokens) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      if (t.empty() || t[0] == '-' || t[0] == '+') throw std::invalid_argument("sign");
      v = std::stoull(t, &used);
    } catch (const std::exception&) {
      throw DomainError("times input: expected a positive integer, got '" + t + "'");
    }
    if (used != t.size() || v == 0) throw DomainError("times input: expected a positive integer, got '" + t + "'");
    times.push_back(static_cast<std::size_t>(v));
  }
  return times;
}

std::vector<std::size_t> parse_parts(const std::string& text) {
  std::vector<std::size_t> parts;
  if (text.empty()) return parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(parse_times({item}).front());
  return parts;
}

std::string join_parts(const std::vector<std::size_t>& parts) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) s += ';';
    s += std::to_string(parts[i]);
  }
  return s;
}

void add_format(CLI::App* sub, Output& o) {
  sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", o.path, "Write output to this file instead of stdout");
}

struct Params {
  double w1 = std::nan("");
  double w2 = std::nan("");
  double alpha = 0.0;
  std::size_t n = 0;
  std::size_t l = 1;
  std::size_t n_max = 0;
  std::size_t i_max = 0;
  std::size_t k_max = 0;
  std::size_t n0 = 0;
  std::size_t k = 0;
  std::size_t start = 0;
  std::size_t steps = 0;
  std::size_t reps = 1;
  std::size_t orders = 2;
  std::size_t horizon = 0;
  double tolerance = 1e-10;
  double z = 0.5;
  double a = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t cap = kDefaultFirstSuccessCap;
  std::string method;
  std::string query;
  std::string input;
  std::string constraint = "free";
  std::string parts;
  std::string mode;
  bool excess = false;

  Weights weights() const { return Weights(w1, w2); }
};

void add_weights(CLI::App* sub, Params& p) {
  sub->add_option("--w1", p.w1, "Success weight w1 > 0")->required();
  sub->add_option("--w2", p.w2, "Failure weight w2 >= 0")->required();
}

int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Harmonic Bernoulli trials: exact laws, estimation and simulation", "harmonic"};
  app.require_subcommand(1);
  Params p;
  Output o;
  std::function<int(std::ostream&)> action;

  auto* pmf_s = app.add_subcommand("pmf-s", "Law of the success count S_n");
  add_weights(pmf_s, p);
  pmf_s->add_option("--n", p.n, "Number of trials")->required();
  pmf_s->add_option("--alpha", p.alpha, "Reinforcement exponent in [0, 1]");
  pmf_s->add_option("--method", p.method, "recursion | stirling | generalized | dobinski")
      ->check(CLI::IsMember({"recursion", "stirling", "generalized", "dobinski"}));
  add_format(pmf_s, o);
  pmf_s->callback([&] {
    action = [&](std::ostream& os) {
      const AlphaModel model(p.weights(), p.alpha);
      const std::string m = p.method.empty() ? "recursion" : p.method;
      if (m != "recursion" && m != "dobinski" && p.alpha != 0.0) {
        throw DomainError("method " + m + " requires alpha = 0");
      }
      FinitePmf pmf;
      if (m == "recursion") pmf = pmf_successes(model, p.n);
      if (m == "stirling") pmf = pmf_successes_closed_form(p.weights(), p.n);
      if (m == "generalized") pmf = pmf_successes_generalized_stirling(p.weights(), p.n);
      if (m == "dobinski") pmf = pmf_successes_dobinski(model, p.n);
      write_pmf(os, o, pmf);
      return kExitOk;
    };
  });

  auto* pmf_k = app.add_subcommand("pmf-k", "Law of the l-th success time K_l+ (or the excess K_l)");
  add_weights(pmf_k, p);
  pmf_k->add_option("--l", p.l, "Success index l >= 1")->required();
  pmf_k->add_option("--n-max", p.n_max, "Largest time tabulated")->required();
  pmf_k->add_flag("--excess", p.excess, "Tabulate K_l = K_l+ - l instead");
  add_format(pmf_k, o);
  pmf_k->callback([&] {
    action = [&](std::ostream& os) {
      if (p.l == 0) throw DomainError("--l must be at least 1");
      if (p.excess) {
        write_pmf(os, o, excess_pmf(p.weights(), p.l, p.n_max));
      } else {
        write_pmf(os, o, passage_table(p.weights(), p.l, p.n_max).column(p.l));
      }
      return kExitOk;
    };
  });

  auto* gap = app.add_subcommand("gap", "Law of the gap L_l+ = K_l+ - K_{l-1}+");
  add_weights(gap, p);
  gap->add_option("--l", p.l, "Gap index l >= 2")->required();
  gap->add_option("--i-max", p.i_max, "Largest gap tabulated")->required();
  gap->add_option("--tolerance", p.tolerance, "Certified error target");
  gap->add_option("--horizon", p.horizon, "Summation cut (0 = adaptive)");
  add_format(gap, o);
  gap->callback([&] {
    action = [&](std::ostream& os) {
      GapOptions opts;
      opts.horizon = p.horizon;
      opts.tolerance = p.tolerance;
      const GapLaw law = gap_pmf(p.weights(), p.l, p.i_max, opts);
      const Notes notes{{"certified", law.certified},
                        {"horizon", law.horizon},
                        {"pmf_error", jnum(law.pmf_error)},
                        {"tail_error", jnum(law.tail_errors.maxCoeff())}};
      write_pmf(os, o, law.pmf, notes);
      if (!law.certified) err << "warning: tolerance not certified within the horizon cap\n";
      return kExitOk;
    };
  });

  auto* fs = app.add_subcommand("first-success", "Law of K_1 = K_1+ - 1 (failures before the first success)");
  add_weights(fs, p);
  fs->add_option("--k-max", p.k_max, "Largest value tabulated")->required();
  add_format(fs, o);
  fs->callback([&] {
    action = [&](std::ostream& os) {
      const auto law = first_success::law(p.weights(), p.k_max);
      Notes notes;
      if (p.w1 > 1.0 || p.w2 == 0.0) notes.emplace_back("mean", jnum(first_success::mean(p.weights())));
      if (p.w1 > 2.0 || p.w2 == 0.0) notes.emplace_back("variance", jnum(first_success::variance(p.weights())));
      write_pmf(os, o, law.probs, notes);
      return kExitOk;
    };
  });

  auto* est_seq = app.add_subcommand("estimate-seq", "Maximum likelihood from a 0/1 trial sequence");
  est_seq->add_option("--input", p.input, "Bits file ('-' or omitted: stdin)");
  est_seq->add_option("--constraint", p.constraint, "free | w=1 | w2=<value>");
  add_format(est_seq, o);
  est_seq->callback([&] {
    action = [&](std::ostream& os) {
      const Constraint c = Constraint::parse(p.constraint);
      const TrialSequence seq = parse_bits(read_input(p.input, in));
      const EstimateReport r = mle_sequence(seq, c);
      json j = estimate_json(r);
      j["n"] = seq.n();
      j["k"] = seq.k();
      write_record(os, o, j);
      return estimate_exit(r);
    };
  });

  auto* est_first = app.add_subcommand("estimate-first", "Estimate (w1, w2) from first-success times");
  est_first->add_option("--input", p.input, "Times file ('-' or omitted: stdin)");
  est_first->add_option("--method", p.method, "mle | moments")->check(CLI::IsMember({"mle", "moments"}));
  add_format(est_first, o);
  est_first->callback([&] {
    action = [&](std::ostream& os) {
      const std::vector<std::size_t> samples = parse_times(read_input(p.input, in));
      if (p.method == "moments") {
        if (samples.size() < 2) throw Infeasible("need at least two samples");
        CompensatedSum s1;
        for (auto v : samples) s1.add(static_cast<double>(v));
        const double mean = s1.value() / static_cast<double>(samples.size());
        CompensatedSum s2;
        for (auto v : samples) s2.add((static_cast<double>(v) - mean) * (static_cast<double>(v) - mean));
        const double var = s2.value() / static_cast<double>(samples.size() - 1);
        const Weights wt = method_of_moments_first_success(mean, var);
        json j;
        j["method"] = "moments";
        j["sample_mean"] = jnum(mean);
        j["sample_variance"] = jnum(var);
        j["w1_hat"] = jnum(wt.w1());
        j["w2_hat"] = jnum(wt.w2());
        write_record(os, o, j);
        return kExitOk;
      }
      const EstimateReport r = mle_first_success(samples);
      json j = estimate_json(r);
      j["samples"] = samples.size();
      write_record(os, o, j);
      return estimate_exit(r);
    };
  });

  auto* moments = app.add_subcommand("moments", "Mean, variance and factorial moments of S_n");
  add_weights(moments, p);
  moments->add_option("--n", p.n, "Number of trials")->required();
  moments->add_option("--alpha", p.alpha, "Reinforcement exponent in [0, 1]");
  moments->add_option("--orders", p.orders, "Factorial moments of order 1..orders (alpha = 0)");
  add_format(moments, o);
  moments->callback([&] {
    action = [&](std::ostream& os) {
      const AlphaModel model(p.weights(), p.alpha);
      json j;
      if (p.alpha == 0.0) {
        const MeanVariance mv = mean_variance(model, p.n);
        j["mean"] = jnum(mv.mean);
        j["variance"] = jnum(mv.variance);
        for (std::size_t l = 1; l <= p.orders; ++l) {
          j["factorial_moment_" + std::to_string(l)] = jnum(factorial_moments(p.weights(), p.n, l));
        }
      } else {
        const FinitePmf pmf = pmf_successes(model, p.n);
        CompensatedSum m1, m2;
        for (std::size_t k = 0; k < pmf.size(); ++k) {
          const double dk = static_cast<double>(k);
          m1.add(dk * pmf.at(k));
          m2.add(dk * dk * pmf.at(k));
        }
        j["mean"] = jnum(m1.value());
        j["variance"] = jnum(m2.value() - m1.value() * m1.value());
      }
      write_record(os, o, j);
      return kExitOk;
    };
  });

  auto* poisson = app.add_subcommand("poisson-bounds", "Total-variation distance to Poisson(mu_n) and its bounds");
  add_weights(poisson, p);
  poisson->add_option("--n", p.n, "Number of trials")->required();
  add_format(poisson, o);
  poisson->callback([&] {
    action = [&](std::ostream& os) {
      const PoissonBoundReport r = poisson_bounds(p.weights(), p.n);
      json j;
      j["mu_n"] = jnum(r.mu_n);
      j["sigma2_n"] = jnum(r.sigma2_n);
      j["tv_lower"] = jnum(r.tv_lower);
      j["tv_exact"] = jnum(r.tv_exact);
      j["tv_upper"] = jnum(r.tv_upper);
      j["cutoff"] = r.cutoff;
      write_record(os, o, j);
      return kExitOk;
    };
  });

  auto* disaster = app.add_subcommand("disaster", "Growth-collapse chain analysis");
  add_weights(disaster, p);
  disaster->add_option("--alpha", p.alpha, "Exponent alpha > 0")->required();
  disaster->add_option("--query", p.query, "classify | invariant | matrix | tail | expected | extinction")
      ->required()
      ->check(CLI::IsMember({"classify", "invariant", "matrix", "tail", "expected", "extinction"}));
  disaster->add_option("--n-max", p.n_max, "Window for the invariant measure");
  disaster->add_option("--n0", p.n0, "Start state");
  disaster->add_option("--n", p.n, "Level to overcross / matrix size");
  disaster->add_option("--l", p.l, "Number of steps");
  disaster->add_option("--z", p.z, "pgf argument in [0, 1)");
  add_format(disaster, o);
  disaster->callback([&] {
    action = [&](std::ostream& os) {
      const ChainSpec spec(p.weights(), p.alpha);
      json j;
      if (p.query == "classify") {
        j["classification"] = to_string(classify(spec));
      } else if (p.query == "invariant") {
        write_pmf(os, o, invariant_measure(spec, p.n_max));
        return kExitOk;
      } else if (p.query == "matrix") {
        const TruncatedMatrix tm = truncated_matrix(spec, p.n);
        if (o.is_json()) {
          j["matrix"] = matrix_json(tm.entries);
          os << j.dump(2) << '\n';
        } else {
          for (Eigen::Index i = 0; i < tm.entries.rows(); ++i) {
            for (Eigen::Index c = 0; c < tm.entries.cols(); ++c) {
              os << (c > 0 ? "," : "") << num(tm.entries(i, c));
            }
            os << '\n';
          }
        }
        return kExitOk;
      } else if (p.query == "tail") {
        j["overcrossing_tail"] = jnum(overcrossing_tail(spec, p.n0, p.n, p.l));
      } else if (p.query == "expected") {
        j["expected_overcrossing"] = jnum(expected_overcrossing(spec, p.n0, p.n));
      } else {
        if (p.w2 != 0.0) throw DomainError("extinction requires w2 = 0");
        const ExtinctionPgf e = extinction_pgf(p.w1, p.alpha, p.n0, p.z);
        j["value"] = jnum(e.value);
        j["escape_mass"] = jnum(e.escape_mass);
        j["truncation_bound"] = jnum(e.truncation_bound);
        j["escape_error"] = jnum(e.escape_error);
      }
      write_record(os, o, j);
      return kExitOk;
    };
  });

  auto* species = app.add_subcommand("species", "Species-sampling joint laws");
  add_weights(species, p);
  species->add_option("--alpha", p.alpha, "Exponent alpha in [0, 1]");
  species->add_option("--query", p.query, "dtg | joint | marginal | table")
      ->required()
      ->check(CLI::IsMember({"dtg", "joint", "marginal", "table"}));
  species->add_option("--n", p.n, "Number of draws");
  species->add_option("--n0", p.n0, "Reservoir hits");
  species->add_option("--k", p.k, "Number of species");
  species->add_option("--parts", p.parts, "Species counts in order of appearance, e.g. 2,1");
  add_format(species, o);
  species->callback([&] {
    action = [&](std::ostream& os) {
      const AlphaModel model(p.weights(), p.alpha);
      json j;
      if (p.query == "dtg") {
        const SampleConfiguration cfg{p.n0, parse_parts(p.parts)};
        j["probability"] = jnum(dtg_joint(model, cfg));
      } else if (p.query == "joint") {
        j["probability"] = jnum(reservoir_success_joint(model, p.n, p.n0, p.k));
      } else if (p.query == "marginal") {
        FinitePmf pmf;
        pmf.probs.resize(static_cast<Eigen::Index>(p.n + 1));
        for (std::size_t m = 0; m <= p.n; ++m) {
          pmf.probs[static_cast<Eigen::Index>(m)] = reservoir_marginal(p.weights(), p.n, m);
        }
        write_pmf(os, o, pmf);
        return kExitOk;
      } else {
        const auto configs = enumerate_configurations(p.n);
        if (o.is_json()) {
          json rows = json::array();
          for (const auto& cfg : configs) {
            rows.push_back({{"n0", cfg.n0}, {"parts", cfg.parts}, {"probability", jnum(dtg_joint(model, cfg))}});
          }
          os << rows.dump(2) << '\n';
        } else {
          os << "n0,parts,probability\n";
          for (const auto& cfg : configs) {
            os << cfg.n0 << ',' << join_parts(cfg.parts) << ',' << num(dtg_joint(model, cfg)) << '\n';
          }
        }
        return kExitOk;
      }
      write_record(os, o, j);
      return kExitOk;
    };
  });

  auto* sim = app.add_subcommand("simulate", "Seeded Monte Carlo samplers");
  sim->add_option("mode", p.mode, "trials | power | first-success | disaster | species")
      ->required()
      ->check(CLI::IsMember({"trials", "power", "first-success", "disaster", "species"}));
  add_weights(sim, p);
  sim->add_option("--seed", p.seed, "Generator seed")->required();
  sim->add_option("--stream", p.stream, "Independent substream index");
  sim->add_option("--alpha", p.alpha, "Reinforcement exponent (trials, species) or chain exponent (disaster)");
  sim->add_option("--a", p.a, "Power-model exponent");
  sim->add_option("--n", p.n, "Trials / draws per replication");
  sim->add_option("--reps", p.reps, "Replications");
  sim->add_option("--cap", p.cap, "Censoring cap for first-success draws");
  sim->add_option("--steps", p.steps, "Chain steps");
  sim->add_option("--start", p.start, "Chain start state");
  add_format(sim, o);
  sim->callback([&] {
    action = [&](std::ostream& os) {
      Rng rng(RngSpec{p.seed, p.stream});
      if (p.mode == "trials" || p.mode == "power") {
        const AlphaModel model(p.weights(), p.mode == "trials" ? p.alpha : 0.0);
        json all = json::array();
        for (std::size_t r = 0; r < p.reps; ++r) {
          const TrialSequence seq = p.mode == "trials" ? sample_trials(model, p.n, rng)
                                                       : sample_power_model(p.weights(), p.a, p.n, rng);
          if (o.is_json()) {
            all.push_back(seq.bits);
          } else {
            for (std::size_t i = 0; i < seq.n(); ++i) os << (i > 0 ? " " : "") << static_cast<int>(seq.bits[i]);
            os << '\n';
          }
        }
        if (o.is_json()) os << all.dump() << '\n';
      } else if (p.mode == "first-success") {
        json samples = json::array();
        std::size_t censored = 0;
        double survival_at_cap = 0.0;
        for (std::size_t r = 0; r < p.reps; ++r) {
          const FirstSuccessDraw d = sample_first_success(p.weights(), rng, p.cap);
          if (d.value) {
            if (o.is_json()) {
              samples.push_back(*d.value);
            } else {
              os << *d.value << '\n';
            }
          } else {
            ++censored;
            survival_at_cap = d.survival_at_cap;
            if (!o.is_json()) os << "# censored cap=" << p.cap << " survival=" << num(d.survival_at_cap) << '\n';
          }
        }
        if (o.is_json()) {
          json j;
          j["samples"] = samples;
          j["censored"] = censored;
          j["cap"] = p.cap;
          j["survival_at_cap"] = jnum(survival_at_cap);
          os << j.dump() << '\n';
        }
      } else if (p.mode == "disaster") {
        const ChainSpec spec(p.weights(), p.alpha);
        const DisasterPath path = sample_disaster(spec, p.steps, p.start, rng);
        if (o.is_json()) {
          json j;
          j["states"] = path.states;
          j["excursion_boundaries"] = path.excursion_boundaries;
          j["records"] = path.records;
          os << j.dump() << '\n';
        } else {
          os << "index,state\n";
          for (std::size_t i = 0; i < path.states.size(); ++i) os << i << ',' << path.states[i] << '\n';
        }
      } else {
        const AlphaModel model(p.weights(), p.alpha);
        json all = json::array();
        if (!o.is_json()) os << "rep,n0,parts\n";
        for (std::size_t r = 0; r < p.reps; ++r) {
          const SampleConfiguration cfg = sample_species_sequence(model, p.n, rng);
          if (o.is_json()) {
            all.push_back({{"n0", cfg.n0}, {"parts", cfg.parts}});
          } else {
            os << r << ',' << cfg.n0 << ',' << join_parts(cfg.parts) << '\n';
          }
        }
        if (o.is_json()) os << all.dump() << '\n';
      }
      return kExitOk;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInvalid;
  }
  if (!action) return kExitInvalid;

  if (o.path.empty()) return action(out);
  std::ostringstream buffer;
  const int code = action(buffer);
  std::ofstream file(o.path, std::ios::binary);
  if (!file) throw DomainError("cannot open output file '" + o.path + "'");
  file << buffer.str();
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, in, out, err);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const LimitExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const NonConvergence& e) {
    err << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const Infeasible& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, in, out, err);
}

}  // namespace harmonic::cli
