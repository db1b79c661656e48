#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace harmonic {

// Error hierarchy. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A table or exact-arithmetic size limit would be exceeded.
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

/// Iterative solver or series did not reach its tolerance.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Inputs are well-formed but admit no solution (infeasible moments,
/// insufficient data, infinite moments).
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// A computed law drifted outside its documented tolerance. Signals a bug.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// The weight pair (w1, w2) of the harmonic trial model; trial m succeeds
/// with probability w1 / (w + m - 1), w = w1 + w2.
class Weights {
 public:
  Weights(double w1, double w2);

  double w1() const noexcept { return w1_; }
  double w2() const noexcept { return w2_; }
  double w() const noexcept { return w1_ + w2_; }

  friend bool operator==(const Weights&, const Weights&) = default;

 private:
  double w1_;
  double w2_;
};

/// Weights plus the reinforcement exponent alpha in [0, 1]. The success
/// probability at step n + 1 from state k is (w1 + k alpha) / (w + n).
class AlphaModel {
 public:
  explicit AlphaModel(Weights weights, double alpha = 0.0);

  const Weights& weights() const noexcept { return weights_; }
  double alpha() const noexcept { return alpha_; }

 private:
  Weights weights_;
  double alpha_;
};

/// Probability sequence on {offset, offset + 1, ...}. `deficit` is the mass
/// known to lie outside the stored window (0 for complete laws).
struct FinitePmf {
  std::size_t offset = 0;
  Eigen::VectorXd probs;
  double deficit = 0.0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(probs.size()); }
  /// One past the largest stored support point.
  std::size_t end() const noexcept { return offset + size(); }
  double total() const { return probs.sum(); }
  /// P(X = x); 0 outside the stored window.
  double at(std::size_t x) const noexcept {
    if (x < offset || x >= end()) return 0.0;
    return probs[static_cast<Eigen::Index>(x - offset)];
  }
};

/// Clamps floating dust in [-1e-15, 0) to zero. When `complete`, checks that
/// the total lies within 1e-10 of 1 - deficit and renormalizes; larger drift
/// or a more negative entry raises ConsistencyError.
void sanitize(FinitePmf& pmf, bool complete = true);

}  // namespace harmonic
