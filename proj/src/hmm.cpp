#include "phmm/hmm.hpp"

#include <cmath>
#include <limits>

#include "phmm/errors.hpp"
#include "trellis.hpp"

namespace phmm {

double ScaledTrellis::log_likelihood() const {
  return scale.array().log().sum() + label_weight.array().log().sum();
}

SampledSequence sample_sequence(const HmmModel& model, std::size_t length,
                                std::mt19937_64& rng) {
  if (length < 1) throw InvalidInput("sample length must be at least 1");
  SampledSequence out;
  out.states.resize(length);
  out.symbols.resize(length);
  int state = sample_index(model.pi, rng);
  for (std::size_t t = 0; t < length; ++t) {
    if (t > 0) state = sample_index(model.A.row(state), rng);
    out.states[t] = state;
    out.symbols[t] = sample_index(model.B.row(state), rng);
  }
  return out;
}

ForwardPass forward_scaled(const HmmModel& model, std::span<const int> obs) {
  validate_observations(model, obs);
  return detail::forward_pass(model, detail::emission_weights(model, obs),
                              Eigen::VectorXd::Ones(static_cast<Eigen::Index>(obs.size())));
}

Eigen::MatrixXd backward_scaled(const HmmModel& model, std::span<const int> obs,
                                const Eigen::VectorXd& scale) {
  validate_observations(model, obs);
  return detail::backward_pass(model, detail::emission_weights(model, obs), scale);
}

ScaledTrellis compute_trellis(const HmmModel& model, std::span<const int> obs) {
  validate_observations(model, obs);
  const Eigen::MatrixXd w = detail::emission_weights(model, obs);
  ForwardPass fwd = detail::forward_pass(
      model, w, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(obs.size())));
  ScaledTrellis trellis;
  trellis.beta_hat = detail::backward_pass(model, w, fwd.scale);
  trellis.alpha_hat = std::move(fwd.alpha_hat);
  trellis.scale = std::move(fwd.scale);
  trellis.label_weight = std::move(fwd.label_weight);
  return trellis;
}

double log_likelihood(const HmmModel& model, std::span<const int> obs) {
  return forward_scaled(model, obs).scale.array().log().sum();
}

Posteriors posteriors(const HmmModel& model, std::span<const int> obs,
                      const ScaledTrellis& trellis) {
  validate_observations(model, obs);
  detail::check_trellis_shape(trellis, obs.size(), model.num_states());
  return detail::posterior_pass(model, detail::emission_weights(model, obs),
                                trellis);
}

HmmModel baum_welch_step(const HmmModel& model, std::span<const int> obs,
                         BUpdateBound bound) {
  const ScaledTrellis trellis = compute_trellis(model, obs);
  return detail::reestimate(posteriors(model, obs, trellis), obs,
                            model.num_symbols(), bound);
}

FitReport baum_welch_fit(const HmmModel& init, std::span<const int> obs,
                         const FitOptions& options) {
  validate_model(init);
  validate_observations(init, obs);
  return detail::run_em(init, obs, options, [&](const HmmModel& m) {
    const ScaledTrellis trellis = compute_trellis(m, obs);
    return std::pair{trellis.log_likelihood(), posteriors(m, obs, trellis)};
  });
}

namespace {

// Scores within this distance of the maximum count as tied; rounding alone
// separates paths whose factors are the same in a different order.
int first_near_max(const Eigen::VectorXd& log_scores) {
  const double best = log_scores.maxCoeff();
  const double slack = kViterbiTieTolerance * (1.0 + std::abs(best));
  for (Eigen::Index i = 0; i < log_scores.size(); ++i) {
    if (log_scores(i) >= best - slack) return static_cast<int>(i);
  }
  return 0;
}

}  // namespace

ViterbiPath viterbi(const HmmModel& model, std::span<const int> obs) {
  validate_observations(model, obs);
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const int n = model.num_states();
  const std::size_t length = obs.size();

  const Eigen::MatrixXd log_a = model.A.array().log().matrix();
  const Eigen::MatrixXd log_b = model.B.array().log().matrix();
  const Eigen::VectorXd log_pi = model.pi.array().log().matrix();

  Eigen::VectorXd delta(n);
  Eigen::VectorXd next(n);
  std::vector<std::vector<int>> back(length, std::vector<int>(static_cast<std::size_t>(n), 0));

  for (int i = 0; i < n; ++i) delta(i) = log_pi(i) + log_b(i, obs[0]);
  if (delta.maxCoeff() == kNegInf) {
    throw DegenerateLikelihood(0, "every state path has zero probability");
  }
  for (std::size_t t = 1; t < length; ++t) {
    for (int j = 0; j < n; ++j) {
      const auto scores = (delta + log_a.col(j)).eval();
      next(j) = scores.maxCoeff() + log_b(j, obs[t]);
      back[t][static_cast<std::size_t>(j)] = first_near_max(scores);
    }
    delta.swap(next);
    if (delta.maxCoeff() == kNegInf) {
      throw DegenerateLikelihood(t, "every state path has zero probability");
    }
  }

  ViterbiPath path;
  path.states.resize(length);
  int state = first_near_max(delta);
  path.log_prob = delta.maxCoeff();
  for (std::size_t t = length; t-- > 0;) {
    path.states[t] = state;
    if (t > 0) state = back[t][static_cast<std::size_t>(state)];
  }
  return path;
}

}  // namespace phmm
