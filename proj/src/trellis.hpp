#pragma once

// Scaled forward/backward recursions over a precomputed per-step emission
// weight matrix W(t, i). The plain HMM uses W(t, i) = B(i, y_t); side
// information multiplies in the normalized label channel.

#include <cmath>
#include <span>
#include <utility>

#include <Eigen/Dense>

#include "phmm/errors.hpp"
#include "phmm/hmm.hpp"

namespace phmm::detail {

Eigen::MatrixXd emission_weights(const HmmModel& model, std::span<const int> obs);

ForwardPass forward_pass(const HmmModel& model, const Eigen::MatrixXd& weights,
                         Eigen::VectorXd label_weight);

Eigen::MatrixXd backward_pass(const HmmModel& model,
                              const Eigen::MatrixXd& weights,
                              const Eigen::VectorXd& scale);

Posteriors posterior_pass(const HmmModel& model, const Eigen::MatrixXd& weights,
                          const ScaledTrellis& trellis);

/// M-step from posteriors, followed by flooring.
HmmModel reestimate(const Posteriors& post, std::span<const int> obs,
                    int num_symbols, BUpdateBound bound);

void check_trellis_shape(const ScaledTrellis& trellis, std::size_t length,
                         int num_states);

/// EM driver shared by both trainers. `evaluate(model)` returns the
/// objective and posteriors; the posteriors of the last scored model feed
/// the next M-step, so each iteration runs one forward-backward pass.
template <typename Evaluate>
FitReport run_em(const HmmModel& init, std::span<const int> obs,
                 const FitOptions& options, Evaluate&& evaluate) {
  if (options.max_iters < 0) throw InvalidInput("max_iters must be >= 0");
  if (!(options.rel_tol >= 0.0)) throw InvalidInput("rel_tol must be >= 0");

  FitReport report;
  HmmModel current = init;
  auto [ll, post] = evaluate(current);
  report.log_likelihood_trace.push_back(ll);
  while (report.iterations_run < options.max_iters) {
    HmmModel next =
        reestimate(post, obs, current.num_symbols(), options.b_update_bound);
    auto [next_ll, next_post] = evaluate(next);
    report.log_likelihood_trace.push_back(next_ll);
    ++report.iterations_run;
    const bool done = next_ll - ll <= options.rel_tol * std::abs(ll);
    current = std::move(next);
    ll = next_ll;
    post = std::move(next_post);
    if (done) {
      report.converged = true;
      break;
    }
  }
  report.final_model = std::move(current);
  return report;
}

}  // namespace phmm::detail
