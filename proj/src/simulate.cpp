#include "harmonic/simulate.hpp"

#include "harmonic/first_success.hpp"
#include "harmonic/numkernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace harmonic {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) noexcept {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(RngSpec spec) {
  std::uint64_t x = spec.seed;
  for (auto& word : s_) word = splitmix64(x);
  for (std::uint64_t i = 0; i < spec.stream; ++i) jump();
}

std::uint64_t Rng::next() noexcept {
  const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = std::rotl(s_[3], 45);
  return result;
}

double Rng::uniform_open() noexcept {
  while (true) {
    const double u = uniform();
    if (u > 0.0) return u;
  }
}

void Rng::jump() noexcept {
  static constexpr std::uint64_t kJump[] = {0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL, 0xa9582618e03fc9aaULL,
                                            0x39abdc4529b1661cULL};
  std::array<std::uint64_t, 4> acc{};
  for (std::uint64_t word : kJump) {
    for (int b = 0; b < 64; ++b) {
      if (word & (std::uint64_t{1} << b)) {
        for (int i = 0; i < 4; ++i) acc[i] ^= s_[i];
      }
      next();
    }
  }
  s_ = acc;
}

TrialSequence sample_trials(const AlphaModel& model, std::size_t n, Rng& rng) {
  const double w1 = model.weights().w1();
  const double w = model.weights().w();
  const double alpha = model.alpha();
  TrialSequence seq;
  seq.bits.resize(n);
  double k = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double p = (w1 + k * alpha) / (w + static_cast<double>(m));
    const bool hit = rng.uniform() < p;
    seq.bits[m] = hit ? 1 : 0;
    if (hit) k += 1.0;
  }
  return seq;
}

TrialSequence sample_trials(const AlphaModel& model, std::size_t n, RngSpec spec) {
  Rng rng(spec);
  return sample_trials(model, n, rng);
}

TrialSequence sample_power_model(const Weights& weights, double a, std::size_t n, Rng& rng) {
  if (!(a > 0.0)) throw DomainError("sample_power_model: exponent must be positive");
  TrialSequence seq;
  seq.bits.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double shift = m == 0 ? 0.0 : std::pow(static_cast<double>(m), a);
    seq.bits[m] = rng.uniform() < weights.w1() / (weights.w() + shift) ? 1 : 0;
  }
  return seq;
}

TrialSequence sample_power_model(const Weights& weights, double a, std::size_t n, RngSpec spec) {
  Rng rng(spec);
  return sample_power_model(weights, a, n, rng);
}

namespace {

// log P(K_1+ > n) for n >= 1 through log-gamma differences.
double log_survival_far(double w2, double w, double n) {
  return std::lgamma(w2 + n) - std::lgamma(w2) - std::lgamma(w + n) + std::lgamma(w);
}

}  // namespace

FirstSuccessDraw sample_first_success(const Weights& weights, Rng& rng, std::uint64_t cap) {
  if (cap == 0) throw DomainError("sample_first_success: cap must be positive");
  FirstSuccessDraw draw;
  const double u = rng.uniform_open();
  if (weights.w2() == 0.0) {
    draw.value = 1;
    return draw;
  }
  const double w2 = weights.w2();
  const double w = weights.w();
  constexpr std::uint64_t kDirect = 64;
  double surv = 1.0;
  for (std::uint64_t n = 1; n <= std::min(cap, kDirect); ++n) {
    surv *= (w2 + static_cast<double>(n) - 1.0) / (w + static_cast<double>(n) - 1.0);
    if (surv <= u) {
      draw.value = n;
      return draw;
    }
  }
  auto censored = [&] {
    draw.value.reset();
    draw.survival_at_cap = first_success::survival(weights, cap);
    return draw;
  };
  if (cap <= kDirect) return censored();

  // Survival still above u at n = 64: search upward on the log scale.
  const double log_u = std::log(u);
  std::uint64_t lo = kDirect;  // log S(lo) > log u
  std::uint64_t hi = 2 * kDirect;
  while (true) {
    if (hi > cap) hi = cap;
    if (log_survival_far(w2, w, static_cast<double>(hi)) <= log_u) break;
    if (hi == cap) return censored();
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (log_survival_far(w2, w, static_cast<double>(mid)) <= log_u) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  draw.value = hi;
  return draw;
}

FirstSuccessDraw sample_first_success(const Weights& weights, RngSpec spec, std::uint64_t cap) {
  Rng rng(spec);
  return sample_first_success(weights, rng, cap);
}

std::vector<std::uint64_t> sample_passage_times(const Weights& weights, std::size_t l, Rng& rng,
                                                std::uint64_t cap) {
  std::vector<std::uint64_t> times;
  times.reserve(l);
  std::uint64_t m = 0;
  for (std::size_t j = 0; j < l; ++j) {
    const Weights shifted(weights.w1(), weights.w2() + static_cast<double>(m));
    const FirstSuccessDraw gap = sample_first_success(shifted, rng, cap);
    if (!gap.value) break;
    m += *gap.value;
    times.push_back(m);
  }
  return times;
}

std::vector<std::size_t> DisasterPath::excursion_lengths() const {
  std::vector<std::size_t> lengths;
  for (std::size_t i = 1; i < excursion_boundaries.size(); ++i) {
    lengths.push_back(excursion_boundaries[i] - excursion_boundaries[i - 1]);
  }
  return lengths;
}

std::vector<std::uint64_t> DisasterPath::running_max() const {
  std::vector<std::uint64_t> out(states.size());
  std::uint64_t top = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    top = i == 0 ? states[0] : std::max(top, states[i]);
    out[i] = top;
  }
  return out;
}

DisasterPath sample_disaster(const ChainSpec& spec, std::size_t steps, std::uint64_t n_start, Rng& rng) {
  DisasterPath path;
  path.states.reserve(steps + 1);
  path.states.push_back(n_start);
  path.records.push_back(0);
  if (n_start == 0) path.excursion_boundaries.push_back(0);
  std::uint64_t top = n_start;
  std::uint64_t state = n_start;
  for (std::size_t i = 1; i <= steps; ++i) {
    state = rng.uniform() <= spec.p(state) ? state + 1 : 0;
    path.states.push_back(state);
    if (state == 0) path.excursion_boundaries.push_back(i);
    if (state > top) {
      top = state;
      path.records.push_back(i);
    }
  }
  return path;
}

DisasterPath sample_disaster(const ChainSpec& spec, std::size_t steps, std::uint64_t n_start, RngSpec spec_rng) {
  Rng rng(spec_rng);
  return sample_disaster(spec, steps, n_start, rng);
}

std::optional<std::uint64_t> sample_overcrossing_time(const ChainSpec& spec, std::uint64_t n0, std::uint64_t n,
                                                      Rng& rng, std::uint64_t cap) {
  std::uint64_t state = n0;
  for (std::uint64_t t = 1; t <= cap; ++t) {
    state = rng.uniform() <= spec.p(state) ? state + 1 : 0;
    if (state > n) return t;
  }
  return std::nullopt;
}

std::optional<std::uint64_t> sample_hitting_zero(const ChainSpec& spec, std::uint64_t n_start,
                                                 std::uint64_t horizon, Rng& rng) {
  if (n_start == 0) return 0;
  std::uint64_t state = n_start;
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    state = rng.uniform() <= spec.p(state) ? state + 1 : 0;
    if (state == 0) return t;
  }
  return std::nullopt;
}

SampleConfiguration sample_species_sequence(const AlphaModel& model, std::size_t n, Rng& rng) {
  const double w1 = model.weights().w1();
  const double w2 = model.weights().w2();
  const double w = model.weights().w();
  const double alpha = model.alpha();
  SampleConfiguration cfg;
  for (std::size_t m = 0; m < n; ++m) {
    const double k = static_cast<double>(cfg.parts.size());
    double x = rng.uniform() * (w + static_cast<double>(m));
    x -= w1 + k * alpha;
    if (x < 0.0) {
      cfg.parts.push_back(1);
      continue;
    }
    x -= w2 + static_cast<double>(cfg.n0);
    if (x < 0.0 || cfg.parts.empty()) {
      ++cfg.n0;
      continue;
    }
    // Fallback for rounding at the top end: the last species with positive weight.
    std::size_t chosen = cfg.parts.size() - 1;
    while (chosen > 0 && static_cast<double>(cfg.parts[chosen]) - alpha <= 0.0) --chosen;
    for (std::size_t l = 0; l < cfg.parts.size(); ++l) {
      x -= static_cast<double>(cfg.parts[l]) - alpha;
      if (x < 0.0) {
        chosen = l;
        break;
      }
    }
    ++cfg.parts[chosen];
  }
  return cfg;
}

SampleConfiguration sample_species_sequence(const AlphaModel& model, std::size_t n, RngSpec spec) {
  Rng rng(spec);
  return sample_species_sequence(model, n, rng);
}

}  // namespace harmonic
