#pragma once

// Estimation of (w1, w2) from a 0/1 trial sequence or from a sample of
// first-success times K_1+.
//
// Both maximum-likelihood problems are reduced to one equation: the w1 score
// gives w1 as a function of w = w1 + w2, which is substituted into the w2
// score and solved by bracketing in log w. Boundary maxima (w1 -> 0,
// w1 -> inf, w2 -> 0, w -> inf) are reported through a flag, never clamped.
//
// Identifiability: among the first-success laws with hypergeometric pgf
// only the (w1, w2) family is identifiable from K_1+ samples, so estimating
// richer families from first-success data is not supported.

#include "harmonic/types.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace harmonic {

/// Observed indicators i_1..i_n.
struct TrialSequence {
  std::vector<std::uint8_t> bits;

  TrialSequence() = default;
  explicit TrialSequence(std::vector<std::uint8_t> b);

  std::size_t n() const noexcept { return bits.size(); }
  std::size_t k() const noexcept;
};

class Constraint {
 public:
  enum class Kind { free, w_eq_one, w2_fixed };

  static Constraint free() { return Constraint(Kind::free, 0.0); }
  static Constraint w_eq_one() { return Constraint(Kind::w_eq_one, 0.0); }
  static Constraint w2_fixed(double value);

  Kind kind() const noexcept { return kind_; }
  double w2_value() const noexcept { return value_; }
  /// "free", "w=1" or "w2=<value>".
  std::string describe() const;
  /// Parses the same syntax; throws DomainError.
  static Constraint parse(const std::string& text);

 private:
  Constraint(Kind kind, double value) : kind_(kind), value_(value) {}
  Kind kind_;
  double value_;
};

enum class Boundary { none, w1_zero, w1_infinite, w2_zero, w_infinite };

std::string to_string(Boundary b);

struct EstimateReport {
  double w1_hat = 0.0;
  /// NaN when w2 is not identified (k = 0).
  double w2_hat = 0.0;
  Constraint constraint = Constraint::free();
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  Boundary boundary = Boundary::none;
  /// Score at the estimate in the estimated coordinates: (w1, w2) for the
  /// free model, w1 alone for constrained models.
  Eigen::VectorXd score;
  /// Inverse observed information in the same coordinates; empty when the
  /// Hessian is not negative definite or the estimate is on the boundary.
  std::optional<Eigen::MatrixXd> covariance;

  /// Square roots of the covariance diagonal (empty without covariance).
  Eigen::VectorXd standard_errors() const;
};

/// log P(I = i) = sum_m log P(I_m = i_m); -inf for impossible sequences.
double log_likelihood_sequence(const Weights& weights, const TrialSequence& seq);

/// Analytic gradient of log_likelihood_sequence in (w1, w2).
Eigen::Vector2d score_sequence(const Weights& weights, const TrialSequence& seq);

/// Maximum-likelihood estimate under the given constraint. Requires n >= 2
/// (Infeasible otherwise). w2=0 requires i_1 = 1.
EstimateReport mle_sequence(const TrialSequence& seq, Constraint constraint);

/// w2 = 0: the likelihood depends on the data only through (n, k). loglik is
/// the kernel k log w1 - log [w1]_n, which differs from the sequence
/// log-likelihood by a constant.
EstimateReport mle_ewens(std::size_t n, std::size_t k);

/// log prod_l P(K_1+ = n_l), P(K_1+ = n) = w1 [w2]_{n-1} / [w]_n.
double log_likelihood_first_success(const Weights& weights, const std::vector<std::size_t>& samples);

/// Analytic gradient in (w1, w2).
Eigen::Vector2d score_first_success(const Weights& weights, const std::vector<std::size_t>& samples);

/// Free-model MLE from first-success times (all >= 1, at least two). When
/// every sample equals 1 the maximum is on the boundary w2 -> 0.
EstimateReport mle_first_success(const std::vector<std::size_t>& samples);

/// Inverts E(K_1+) = (w - 1)/(w1 - 1) and Var(K_1) = w1 (w-1) E(K_1) /
/// ((w1-1)(w1-2)): w1 = 2v / (v - m(m-1)), w2 = (m-1)(w1-1). Feasible iff
/// m > 1 and v > m(m-1); the solution then has w1 > 2.
Weights method_of_moments_first_success(double mean, double variance);

}  // namespace harmonic
