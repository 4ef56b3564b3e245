#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace phmm {

using ObservationSequence = std::vector<int>;
using StateSequence = std::vector<int>;

/// Discrete HMM parameters. A(i, j) = P(z_t = j | z_{t-1} = i),
/// B(i, k) = P(y_t = k | z_t = i), pi(i) = P(z_1 = i).
struct HmmModel {
  Eigen::VectorXd pi;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;

  int num_states() const { return static_cast<int>(pi.size()); }
  int num_symbols() const { return static_cast<int>(B.cols()); }
};

inline constexpr double kRowSumTolerance = 1e-9;
inline constexpr double kProbabilityFloor = 1e-12;

/// Throws InvalidModel naming the first violated constraint.
void validate_model(const HmmModel& model);

/// Throws InvalidInput if any symbol is outside [0, num_symbols) or the
/// sequence is empty.
void validate_observations(const HmmModel& model, std::span<const int> obs);

/// Every entry below kProbabilityFloor is raised to it and its row
/// renormalized.
void floor_and_renormalize(HmmModel& model, double floor = kProbabilityFloor);

/// Rows of pi, A and B drawn from a flat Dirichlet.
HmmModel random_model(int num_states, int num_symbols, std::mt19937_64& rng);
HmmModel random_model(int num_states, int num_symbols, std::uint64_t seed);

/// The three-state model used by the state-recognition experiments.
HmmModel reference_model();

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Index drawn from a discrete distribution given as a row of weights
/// summing to one.
template <typename Row>
int sample_index(const Row& probs, std::mt19937_64& rng) {
  const double u = uniform01(rng);
  double cumulative = 0.0;
  int last_positive = 0;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    if (probs(k) <= 0.0) continue;
    cumulative += probs(k);
    last_positive = static_cast<int>(k);
    if (u < cumulative) return last_positive;
  }
  return last_positive;
}

}  // namespace phmm
