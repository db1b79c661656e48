#include "harmonic/types.hpp"

#include <cmath>
#include <string>

namespace harmonic {

Weights::Weights(double w1, double w2) : w1_(w1), w2_(w2) {
  if (!(w1 > 0.0) || !std::isfinite(w1)) {
    throw DomainError("w1 must be positive and finite, got " + std::to_string(w1));
  }
  if (!(w2 >= 0.0) || !std::isfinite(w2)) {
    throw DomainError("w2 must be nonnegative and finite, got " + std::to_string(w2));
  }
}

AlphaModel::AlphaModel(Weights weights, double alpha) : weights_(weights), alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
}

void sanitize(FinitePmf& pmf, bool complete) {
  for (auto& p : pmf.probs) {
    if (p < 0.0) {
      if (p < -1e-15) {
        throw ConsistencyError("pmf entry " + std::to_string(p) + " is negative beyond dust");
      }
      p = 0.0;
    }
  }
  if (!complete) return;
  const double target = 1.0 - pmf.deficit;
  const double total = pmf.total();
  if (std::abs(total - target) > 1e-10) {
    throw ConsistencyError("pmf total " + std::to_string(total) + " drifted from " +
                           std::to_string(target));
  }
  if (total > 0.0) pmf.probs *= target / total;
}

}  // namespace harmonic
