#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "phmm/hmm.hpp"
#include "phmm/model.hpp"

namespace phmm {

/// Label value for a step whose state was not observed.
inline constexpr int kUnobserved = -1;

/// Per-step labels; each entry is a state index or kUnobserved.
using LabelSequence = std::vector<int>;

/// Side-information channel: each hidden state is revealed with probability
/// tau, and a revealed label is correct with probability p; wrong labels are
/// uniform over the other num_states - 1 states.
struct SideInfoParams {
  double tau = 0.0;
  double p = 1.0;
  int num_states = 1;
};

/// Validated constructor. With one state a wrong label cannot exist, so p is
/// forced to 1.
SideInfoParams make_side_info(double tau, double p, int num_states);

void validate_side_info(const SideInfoParams& side);

/// Throws InvalidInput unless labels has the same length as obs and every
/// non-sentinel entry is a valid state.
void validate_labels(const SideInfoParams& side, std::span<const int> obs,
                     std::span<const int> labels);

/// P(label | true state): (1 - tau) for kUnobserved, tau * p on a match,
/// tau * (1 - p) / (N - 1) on a mismatch.
double nu(int label, int state, const SideInfoParams& side);

ForwardPass phmm_forward_scaled(const HmmModel& model, std::span<const int> obs,
                                std::span<const int> labels,
                                const SideInfoParams& side);

Eigen::MatrixXd phmm_backward_scaled(const HmmModel& model,
                                     std::span<const int> obs,
                                     std::span<const int> labels,
                                     const SideInfoParams& side,
                                     const Eigen::VectorXd& scale);

ScaledTrellis phmm_trellis(const HmmModel& model, std::span<const int> obs,
                           std::span<const int> labels,
                           const SideInfoParams& side);

/// log P(Y, X | model).
double joint_log_likelihood(const HmmModel& model, std::span<const int> obs,
                            std::span<const int> labels,
                            const SideInfoParams& side);

Posteriors phmm_posteriors(const HmmModel& model, std::span<const int> obs,
                           std::span<const int> labels,
                           const SideInfoParams& side,
                           const ScaledTrellis& trellis);

HmmModel phmm_em_step(const HmmModel& model, std::span<const int> obs,
                      std::span<const int> labels, const SideInfoParams& side,
                      BUpdateBound bound = BUpdateBound::Full);

/// As baum_welch_fit, tracking log P(Y, X | model).
FitReport phmm_fit(const HmmModel& init, std::span<const int> obs,
                   std::span<const int> labels, const SideInfoParams& side,
                   const FitOptions& options = {});

}  // namespace phmm
