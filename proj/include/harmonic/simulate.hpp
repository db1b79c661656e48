#pragma once

// Seeded Monte Carlo samplers.
//
// Generator: xoshiro256** (Blackman and Vigna). The state is seeded by four
// SplitMix64 outputs of `seed`; stream s is that state advanced by s jumps of
// 2^128 draws, so streams never overlap for fewer than 2^128 draws each.
// Uniforms are (x >> 11) * 2^-53. All samplers use only these uniforms (no
// std:: distributions), so output is bit-identical across platforms.
// Setting up stream s costs O(s) jumps; draw many replications from one
// stream rather than one stream per replication.

#include "harmonic/disaster_chain.hpp"
#include "harmonic/estimation.hpp"
#include "harmonic/species_sampling.hpp"
#include "harmonic/types.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace harmonic {

struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

class Rng {
 public:
  explicit Rng(RngSpec spec);

  std::uint64_t next() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open() noexcept;
  /// Advances the state by 2^128 draws.
  void jump() noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// Bits with P(I_{m+1} = 1 | S_m = k) = (w1 + k alpha)/(w + m).
TrialSequence sample_trials(const AlphaModel& model, std::size_t n, Rng& rng);
TrialSequence sample_trials(const AlphaModel& model, std::size_t n, RngSpec spec);

/// Independent bits with P(I_m = 1) = w1 / (w + (m-1)^a), m = 1..n, 0^a = 0.
/// a = 1 is the harmonic model.
TrialSequence sample_power_model(const Weights& weights, double a, std::size_t n, Rng& rng);
TrialSequence sample_power_model(const Weights& weights, double a, std::size_t n, RngSpec spec);

struct FirstSuccessDraw {
  /// K_1+, or nullopt when the draw exceeds the cap (censored).
  std::optional<std::uint64_t> value;
  /// P(K_1+ > cap), reported with every censored draw.
  double survival_at_cap = 0.0;
};

inline constexpr std::uint64_t kDefaultFirstSuccessCap = 1'000'000'000;

/// Inverse transform on the survival function: K_1+ = min{n : P(K_1+ > n) <= U}.
/// Equivalent in law to drawing trials until the first success; the first 64
/// survival values are multiplied out, later ones located by exponential
/// search and bisection on log-gamma differences.
FirstSuccessDraw sample_first_success(const Weights& weights, Rng& rng,
                                      std::uint64_t cap = kDefaultFirstSuccessCap);
FirstSuccessDraw sample_first_success(const Weights& weights, RngSpec spec,
                                      std::uint64_t cap = kDefaultFirstSuccessCap);

/// K_1+, ..., K_l+ (alpha = 0). Given K_j+ = m the next gap has survival
/// [w2+m]_n/[w+m]_n, i.e. it is a first-success time for weights (w1, w2+m).
/// Stops early (shorter result) when a gap is censored at `cap`.
std::vector<std::uint64_t> sample_passage_times(const Weights& weights, std::size_t l, Rng& rng,
                                                std::uint64_t cap = kDefaultFirstSuccessCap);

struct DisasterPath {
  std::vector<std::uint64_t> states;                 ///< N_0..N_m
  std::vector<std::size_t> excursion_boundaries;     ///< indices i with N_i = 0
  std::vector<std::size_t> records;                  ///< indices where the running maximum increases (0 included)

  /// Lengths of completed excursions (return times to 0).
  std::vector<std::size_t> excursion_lengths() const;
  /// N_l* = max_{i <= l} N_i.
  std::vector<std::uint64_t> running_max() const;
};

/// N_{m+1} = N_m + 1 if U_{m+1} <= p_{N_m}, else 0.
DisasterPath sample_disaster(const ChainSpec& spec, std::size_t steps, std::uint64_t n_start, Rng& rng);
DisasterPath sample_disaster(const ChainSpec& spec, std::size_t steps, std::uint64_t n_start, RngSpec rng);

/// First time the chain started at n0 exceeds n; nullopt past `cap` steps.
std::optional<std::uint64_t> sample_overcrossing_time(const ChainSpec& spec, std::uint64_t n0, std::uint64_t n,
                                                      Rng& rng, std::uint64_t cap = 1'000'000'000);

/// First time the chain started at n_start hits 0 within `horizon` steps.
std::optional<std::uint64_t> sample_hitting_zero(const ChainSpec& spec, std::uint64_t n_start,
                                                 std::uint64_t horizon, Rng& rng);

/// Sequential species sampler: after m draws with k species and n0 reservoir
/// hits, the next draw is a new species w.p. (w1 + k alpha)/(w + m), species l
/// w.p. (n_l - alpha)/(w + m), the reservoir w.p. (w2 + n0)/(w + m).
SampleConfiguration sample_species_sequence(const AlphaModel& model, std::size_t n, Rng& rng);
SampleConfiguration sample_species_sequence(const AlphaModel& model, std::size_t n, RngSpec spec);

}  // namespace harmonic
