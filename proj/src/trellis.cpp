#include "trellis.hpp"

#include <cmath>

#include "phmm/errors.hpp"

namespace phmm::detail {

Eigen::MatrixXd emission_weights(const HmmModel& model,
                                 std::span<const int> obs) {
  const auto length = static_cast<Eigen::Index>(obs.size());
  Eigen::MatrixXd w(length, model.num_states());
  for (Eigen::Index t = 0; t < length; ++t) {
    w.row(t) = model.B.col(obs[static_cast<std::size_t>(t)]).transpose();
  }
  return w;
}

ForwardPass forward_pass(const HmmModel& model, const Eigen::MatrixXd& weights,
                         Eigen::VectorXd label_weight) {
  const Eigen::Index length = weights.rows();
  const Eigen::Index n = weights.cols();
  ForwardPass out;
  out.alpha_hat.resize(length, n);
  out.scale.resize(length);
  out.label_weight = std::move(label_weight);

  for (Eigen::Index t = 0; t < length; ++t) {
    if (t == 0) {
      out.alpha_hat.row(0) = model.pi.transpose().cwiseProduct(weights.row(0));
    } else {
      out.alpha_hat.row(t) =
          (out.alpha_hat.row(t - 1) * model.A).cwiseProduct(weights.row(t));
    }
    const double c = out.alpha_hat.row(t).sum();
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw DegenerateLikelihood(static_cast<std::size_t>(t),
                                 "observations have zero probability under the model");
    }
    out.scale(t) = c;
    out.alpha_hat.row(t) /= c;
  }
  return out;
}

Eigen::MatrixXd backward_pass(const HmmModel& model,
                              const Eigen::MatrixXd& weights,
                              const Eigen::VectorXd& scale) {
  const Eigen::Index length = weights.rows();
  if (scale.size() != length) {
    throw InvalidInput("scale vector length does not match the sequence");
  }
  Eigen::MatrixXd beta_hat(length, weights.cols());
  beta_hat.row(length - 1).setOnes();
  for (Eigen::Index t = length - 2; t >= 0; --t) {
    const Eigen::RowVectorXd next =
        weights.row(t + 1).cwiseProduct(beta_hat.row(t + 1));
    beta_hat.row(t) = (model.A * next.transpose()).transpose() / scale(t + 1);
  }
  return beta_hat;
}

Posteriors posterior_pass(const HmmModel& model, const Eigen::MatrixXd& weights,
                          const ScaledTrellis& trellis) {
  const Eigen::Index length = weights.rows();
  const Eigen::Index n = weights.cols();
  Posteriors post;
  post.gamma.resize(length, n);
  post.epsilon.reserve(static_cast<std::size_t>(length > 0 ? length - 1 : 0));
  for (Eigen::Index t = 0; t + 1 < length; ++t) {
    const Eigen::RowVectorXd next =
        weights.row(t + 1).cwiseProduct(trellis.beta_hat.row(t + 1)) /
        trellis.scale(t + 1);
    Eigen::MatrixXd eps =
        trellis.alpha_hat.row(t).transpose().asDiagonal() * model.A *
        next.asDiagonal();
    post.gamma.row(t) = eps.rowwise().sum().transpose();
    post.epsilon.push_back(std::move(eps));
  }
  post.gamma.row(length - 1) = trellis.alpha_hat.row(length - 1);
  return post;
}

HmmModel reestimate(const Posteriors& post, std::span<const int> obs,
                    int num_symbols, BUpdateBound bound) {
  const auto length = static_cast<Eigen::Index>(obs.size());
  const Eigen::Index n = post.gamma.cols();
  const Eigen::Index transitions = length - 1;
  const Eigen::Index emissions =
      bound == BUpdateBound::Paper ? length - 1 : length;

  Eigen::MatrixXd a_num = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd a_den = Eigen::VectorXd::Zero(n);
  for (Eigen::Index t = 0; t < transitions; ++t) {
    a_num += post.epsilon[static_cast<std::size_t>(t)];
    a_den += post.gamma.row(t).transpose();
  }
  Eigen::MatrixXd b_num = Eigen::MatrixXd::Zero(n, num_symbols);
  Eigen::VectorXd b_den = Eigen::VectorXd::Zero(n);
  for (Eigen::Index t = 0; t < emissions; ++t) {
    b_num.col(obs[static_cast<std::size_t>(t)]) += post.gamma.row(t).transpose();
    b_den += post.gamma.row(t).transpose();
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(a_den(i) > 0.0) || !(b_den(i) > 0.0)) {
      throw DegenerateStatistics(static_cast<int>(i),
                                 "zero expected occupancy in re-estimation");
    }
  }

  HmmModel next;
  next.A = a_den.cwiseInverse().asDiagonal() * a_num;
  next.B = b_den.cwiseInverse().asDiagonal() * b_num;
  next.pi = post.gamma.row(0).transpose();
  floor_and_renormalize(next);
  return next;
}

void check_trellis_shape(const ScaledTrellis& trellis, std::size_t length,
                         int num_states) {
  const auto len = static_cast<Eigen::Index>(length);
  if (trellis.alpha_hat.rows() != len || trellis.beta_hat.rows() != len ||
      trellis.scale.size() != len || trellis.alpha_hat.cols() != num_states ||
      trellis.beta_hat.cols() != num_states) {
    throw InvalidInput("trellis does not match the sequence and model");
  }
}

}  // namespace phmm::detail
