#include "phmm/simulate.hpp"

#include <algorithm>

#include "phmm/errors.hpp"

namespace phmm {

LabelSequence corrupt_labels(std::span<const int> truth, double tau,
                             double p_true, int num_states,
                             std::mt19937_64& rng) {
  if (!(tau >= 0.0 && tau <= 1.0) || !(p_true >= 0.0 && p_true <= 1.0)) {
    throw InvalidInput("tau and p_true must lie in [0, 1]");
  }
  if (num_states < 1) throw InvalidInput("num_states must be positive");
  if (num_states == 1 && p_true < 1.0) {
    throw InvalidInput("wrong labels need at least two states");
  }
  LabelSequence labels(truth.size(), kUnobserved);
  for (std::size_t t = 0; t < truth.size(); ++t) {
    const int z = truth[t];
    if (z < 0 || z >= num_states) throw InvalidInput("truth contains an invalid state");
    const double u_observe = uniform01(rng);
    const double u_correct = uniform01(rng);
    const double u_wrong = uniform01(rng);
    if (u_observe >= tau) continue;
    if (u_correct < p_true) {
      labels[t] = z;
      continue;
    }
    const int k = std::min(static_cast<int>(u_wrong * (num_states - 1)),
                           num_states - 2);
    labels[t] = k < z ? k : k + 1;
  }
  return labels;
}

}  // namespace phmm
