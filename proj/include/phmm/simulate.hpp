#pragma once

#include <random>
#include <span>

#include "phmm/side_info.hpp"

namespace phmm {

/// Passes each true state through the side-information channel
/// independently: unobserved with probability 1 - tau, otherwise the true
/// state with probability p_true and a uniformly chosen wrong state with
/// probability 1 - p_true.
///
/// Exactly three uniforms are consumed per position whatever the outcome,
/// so two calls with the same engine state and different (tau, p_true)
/// reveal nested sets of positions.
LabelSequence corrupt_labels(std::span<const int> truth, double tau,
                             double p_true, int num_states,
                             std::mt19937_64& rng);

}  // namespace phmm
