#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "phmm/model.hpp"

namespace phmm {

/// Which time steps contribute to the emission re-estimate. `Full` sums
/// t = 1..T. `Paper` sums t = 1..T-1 like the transition update; it drops
/// the last observation from the M-step, so the likelihood is no longer
/// guaranteed to increase at every iteration.
enum class BUpdateBound { Paper, Full };

/// Output of a scaled forward pass.
///
/// alpha_hat rows sum to one. The unscaled forward variable at step t is
/// alpha_hat(t, i) * prod_{u <= t} scale(u) * label_weight(u). For the plain
/// HMM label_weight is all ones; with side information it carries the
/// per-step factor pulled out of the label channel before normalization.
struct ForwardPass {
  Eigen::MatrixXd alpha_hat;     // T x N
  Eigen::VectorXd scale;         // T
  Eigen::VectorXd label_weight;  // T
};

struct ScaledTrellis {
  Eigen::MatrixXd alpha_hat;  // T x N
  Eigen::MatrixXd beta_hat;   // T x N
  Eigen::VectorXd scale;
  Eigen::VectorXd label_weight;

  std::size_t length() const { return static_cast<std::size_t>(scale.size()); }

  /// sum_t log(scale(t)) + log(label_weight(t)).
  double log_likelihood() const;
};

struct Posteriors {
  /// epsilon[t](i, j) = P(z_t = i, z_{t+1} = j | data), t < T-1.
  std::vector<Eigen::MatrixXd> epsilon;
  /// gamma(t, i) = P(z_t = i | data).
  Eigen::MatrixXd gamma;
};

struct SampledSequence {
  StateSequence states;
  ObservationSequence symbols;
};

struct FitOptions {
  int max_iters = 200;
  double rel_tol = 1e-6;
  BUpdateBound b_update_bound = BUpdateBound::Full;
};

struct FitReport {
  HmmModel final_model;
  /// Log-likelihood of the initial model followed by one entry per
  /// re-estimation; final_model scores the last entry.
  std::vector<double> log_likelihood_trace;
  int iterations_run = 0;
  bool converged = false;
};

struct ViterbiPath {
  StateSequence states;
  double log_prob = 0.0;
};

SampledSequence sample_sequence(const HmmModel& model, std::size_t length,
                                std::mt19937_64& rng);

ForwardPass forward_scaled(const HmmModel& model, std::span<const int> obs);

Eigen::MatrixXd backward_scaled(const HmmModel& model, std::span<const int> obs,
                                const Eigen::VectorXd& scale);

ScaledTrellis compute_trellis(const HmmModel& model, std::span<const int> obs);

double log_likelihood(const HmmModel& model, std::span<const int> obs);

Posteriors posteriors(const HmmModel& model, std::span<const int> obs,
                      const ScaledTrellis& trellis);

/// One Baum-Welch re-estimation followed by probability flooring.
HmmModel baum_welch_step(const HmmModel& model, std::span<const int> obs,
                         BUpdateBound bound = BUpdateBound::Full);

/// Iterates baum_welch_step until the relative log-likelihood improvement
/// drops to rel_tol or below, or max_iters re-estimations have run.
FitReport baum_welch_fit(const HmmModel& init, std::span<const int> obs,
                         const FitOptions& options = {});

/// Log-probabilities closer than this (relative) are treated as equal when
/// breaking Viterbi ties.
inline constexpr double kViterbiTieTolerance = 1e-12;

/// Most probable state path. Among equally probable paths the one with the
/// lowest state index at each backtracking step wins.
ViterbiPath viterbi(const HmmModel& model, std::span<const int> obs);

}  // namespace phmm
