#include "phmm/side_info.hpp"

#include <string>

#include "phmm/errors.hpp"
#include "trellis.hpp"

namespace phmm {
namespace {

struct LabelChannel {
  Eigen::MatrixXd weights;  // T x N, nu(x_t, i) / max_k nu(x_t, k)
  Eigen::VectorXd factor;   // T, max_k nu(x_t, k)
};

// The channel weight is split into a per-step constant and a normalized part
// before it enters the recursion. An unobserved step normalizes to exactly
// one, so an all-sentinel sequence runs the plain HMM arithmetic bit for bit.
LabelChannel label_channel(std::span<const int> labels,
                           const SideInfoParams& side) {
  const auto length = static_cast<Eigen::Index>(labels.size());
  LabelChannel ch;
  ch.weights.resize(length, side.num_states);
  ch.factor.resize(length);
  for (Eigen::Index t = 0; t < length; ++t) {
    const int label = labels[static_cast<std::size_t>(t)];
    for (int i = 0; i < side.num_states; ++i) ch.weights(t, i) = nu(label, i, side);
    const double f = ch.weights.row(t).maxCoeff();
    if (!(f > 0.0)) {
      throw DegenerateLikelihood(static_cast<std::size_t>(t),
                                 "label has zero probability under the side-information channel");
    }
    ch.factor(t) = f;
    ch.weights.row(t) /= f;
  }
  return ch;
}

Eigen::MatrixXd combined_weights(const HmmModel& model, std::span<const int> obs,
                                 const LabelChannel& ch) {
  return detail::emission_weights(model, obs).cwiseProduct(ch.weights);
}

void check_inputs(const HmmModel& model, std::span<const int> obs,
                  std::span<const int> labels, const SideInfoParams& side) {
  validate_observations(model, obs);
  if (side.num_states != model.num_states()) {
    throw InvalidInput("side-information state count " +
                       std::to_string(side.num_states) +
                       " does not match the model's " +
                       std::to_string(model.num_states()));
  }
  validate_labels(side, obs, labels);
}

}  // namespace

SideInfoParams make_side_info(double tau, double p, int num_states) {
  SideInfoParams side{tau, num_states == 1 ? 1.0 : p, num_states};
  validate_side_info(side);
  return side;
}

void validate_side_info(const SideInfoParams& side) {
  if (!(side.tau >= 0.0 && side.tau <= 1.0)) {
    throw InvalidInput("tau must lie in [0, 1]");
  }
  if (!(side.p >= 0.0 && side.p <= 1.0)) {
    throw InvalidInput("p must lie in [0, 1]");
  }
  if (side.num_states < 1) throw InvalidInput("num_states must be positive");
  if (side.num_states == 1 && side.p != 1.0) {
    throw InvalidInput("with a single state p must be 1");
  }
}

void validate_labels(const SideInfoParams& side, std::span<const int> obs,
                     std::span<const int> labels) {
  if (labels.size() != obs.size()) {
    throw InvalidInput("side information has " + std::to_string(labels.size()) +
                       " labels but there are " + std::to_string(obs.size()) +
                       " observations");
  }
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const int x = labels[t];
    if (x != kUnobserved && (x < 0 || x >= side.num_states)) {
      throw InvalidInput("label " + std::to_string(t) + " = " +
                         std::to_string(x) + " is not a state");
    }
  }
}

double nu(int label, int state, const SideInfoParams& side) {
  if (label == kUnobserved) return 1.0 - side.tau;
  if (label == state) return side.tau * side.p;
  return side.tau * (1.0 - side.p) / static_cast<double>(side.num_states - 1);
}

ForwardPass phmm_forward_scaled(const HmmModel& model, std::span<const int> obs,
                                std::span<const int> labels,
                                const SideInfoParams& side) {
  validate_side_info(side);
  check_inputs(model, obs, labels, side);
  LabelChannel ch = label_channel(labels, side);
  return detail::forward_pass(model, combined_weights(model, obs, ch),
                              std::move(ch.factor));
}

Eigen::MatrixXd phmm_backward_scaled(const HmmModel& model,
                                     std::span<const int> obs,
                                     std::span<const int> labels,
                                     const SideInfoParams& side,
                                     const Eigen::VectorXd& scale) {
  validate_side_info(side);
  check_inputs(model, obs, labels, side);
  return detail::backward_pass(
      model, combined_weights(model, obs, label_channel(labels, side)), scale);
}

ScaledTrellis phmm_trellis(const HmmModel& model, std::span<const int> obs,
                           std::span<const int> labels,
                           const SideInfoParams& side) {
  validate_side_info(side);
  check_inputs(model, obs, labels, side);
  LabelChannel ch = label_channel(labels, side);
  const Eigen::MatrixXd w = combined_weights(model, obs, ch);
  ForwardPass fwd = detail::forward_pass(model, w, std::move(ch.factor));
  ScaledTrellis trellis;
  trellis.beta_hat = detail::backward_pass(model, w, fwd.scale);
  trellis.alpha_hat = std::move(fwd.alpha_hat);
  trellis.scale = std::move(fwd.scale);
  trellis.label_weight = std::move(fwd.label_weight);
  return trellis;
}

double joint_log_likelihood(const HmmModel& model, std::span<const int> obs,
                            std::span<const int> labels,
                            const SideInfoParams& side) {
  const ForwardPass fwd = phmm_forward_scaled(model, obs, labels, side);
  return fwd.scale.array().log().sum() + fwd.label_weight.array().log().sum();
}

Posteriors phmm_posteriors(const HmmModel& model, std::span<const int> obs,
                           std::span<const int> labels,
                           const SideInfoParams& side,
                           const ScaledTrellis& trellis) {
  validate_side_info(side);
  check_inputs(model, obs, labels, side);
  detail::check_trellis_shape(trellis, obs.size(), model.num_states());
  return detail::posterior_pass(
      model, combined_weights(model, obs, label_channel(labels, side)), trellis);
}

HmmModel phmm_em_step(const HmmModel& model, std::span<const int> obs,
                      std::span<const int> labels, const SideInfoParams& side,
                      BUpdateBound bound) {
  const ScaledTrellis trellis = phmm_trellis(model, obs, labels, side);
  return detail::reestimate(phmm_posteriors(model, obs, labels, side, trellis),
                            obs, model.num_symbols(), bound);
}

FitReport phmm_fit(const HmmModel& init, std::span<const int> obs,
                   std::span<const int> labels, const SideInfoParams& side,
                   const FitOptions& options) {
  validate_model(init);
  validate_side_info(side);
  check_inputs(init, obs, labels, side);
  // The channel does not depend on the model, so it is built once.
  const LabelChannel ch = label_channel(labels, side);
  return detail::run_em(init, obs, options, [&](const HmmModel& m) {
    const Eigen::MatrixXd w = combined_weights(m, obs, ch);
    ForwardPass fwd = detail::forward_pass(m, w, ch.factor);
    ScaledTrellis trellis;
    trellis.beta_hat = detail::backward_pass(m, w, fwd.scale);
    trellis.alpha_hat = std::move(fwd.alpha_hat);
    trellis.scale = std::move(fwd.scale);
    trellis.label_weight = std::move(fwd.label_weight);
    const double ll = trellis.log_likelihood();
    return std::pair{ll, detail::posterior_pass(m, w, trellis)};
  });
}

}  // namespace phmm
