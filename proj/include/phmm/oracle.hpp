#pragma once

// Reference quantities computed by summing over every state path. These are
// direct transcriptions of the path probability
//   pi(z1) B(z1, y1) nu(x1, z1) * prod_t A(z_{t-1}, z_t) B(z_t, y_t) nu(x_t, z_t)
// and share no code with the trellis recursions they are used to check.

#include <cstdint>
#include <optional>
#include <span>

#include "phmm/model.hpp"
#include "phmm/side_info.hpp"

namespace phmm::oracle {

inline constexpr std::uint64_t kMaxPaths = 1'000'000;

/// Labels plus channel parameters; absent means plain P(Y | model).
struct SideChannel {
  std::span<const int> labels;
  SideInfoParams params;
};

double path_probability(const HmmModel& model, std::span<const int> obs,
                        const std::optional<SideChannel>& side,
                        std::span<const int> path);

/// P(Y, X | model), or P(Y | model) without side information.
double enumerate_joint(const HmmModel& model, std::span<const int> obs,
                       const std::optional<SideChannel>& side = std::nullopt);

/// P(z_t = i, z_{t+1} = j | Y, X, model).
double enumerate_posterior(const HmmModel& model, std::span<const int> obs,
                           const std::optional<SideChannel>& side,
                           std::size_t t, int i, int j);

/// P(z_t = i | Y, X, model).
double enumerate_state_posterior(const HmmModel& model,
                                 std::span<const int> obs,
                                 const std::optional<SideChannel>& side,
                                 std::size_t t, int i);

struct BestPath {
  StateSequence states;
  double prob = 0.0;
};

/// Exact argmax of P(Z, Y | model). Ties (within kViterbiTieTolerance) go
/// to the path that is smallest when compared from the last step backwards,
/// matching viterbi.
BestPath enumerate_best_path(const HmmModel& model, std::span<const int> obs);

}  // namespace phmm::oracle
