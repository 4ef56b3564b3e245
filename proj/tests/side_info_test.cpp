#include <chrono>
#include <cmath>

#include <gtest/gtest.h>

#include "phmm/errors.hpp"
#include "phmm/oracle.hpp"
#include "phmm/side_info.hpp"
#include "test_support.hpp"

namespace phmm {
namespace {

using testing::expect_relative_near;
using testing::random_labels;
using testing::random_side;
using testing::random_symbols;

constexpr int kNone = kUnobserved;

TEST(Nu, ThreeBranches) {
  const SideInfoParams side = make_side_info(0.3, 0.8, 3);
  EXPECT_NEAR(nu(kNone, 0, side), 0.7, 1e-15);
  EXPECT_NEAR(nu(kNone, 2, side), 0.7, 1e-15);
  EXPECT_NEAR(nu(1, 1, side), 0.24, 1e-15);
  EXPECT_NEAR(nu(2, 1, side), 0.03, 1e-15);
  EXPECT_NEAR(nu(0, 1, side), 0.03, 1e-15);
}

TEST(Nu, ZeroTauOnlyUnobservedHasMass) {
  const SideInfoParams side = make_side_info(0.0, 0.8, 3);
  EXPECT_EQ(nu(kNone, 0, side), 1.0);
  EXPECT_EQ(nu(0, 0, side), 0.0);
  EXPECT_EQ(nu(1, 0, side), 0.0);
}

TEST(Nu, IsAProperChannelForEveryTrueState) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 4;
    const SideInfoParams side =
        make_side_info(uniform01(rng), uniform01(rng), n);
    for (int state = 0; state < n; ++state) {
      double total = nu(kNone, state, side);
      for (int label = 0; label < n; ++label) total += nu(label, state, side);
      EXPECT_NEAR(total, 1.0, 1e-14);
    }
  }
}

TEST(SideInfoParams, SingleStateForcesFullConfidence) {
  EXPECT_EQ(make_side_info(0.4, 0.3, 1).p, 1.0);
  EXPECT_THROW(make_side_info(1.5, 0.5, 3), InvalidInput);
  EXPECT_THROW(make_side_info(0.5, -0.1, 3), InvalidInput);
  EXPECT_THROW(validate_side_info(SideInfoParams{0.5, 0.5, 1}), InvalidInput);
}

TEST(PhmmForward, AllUnobservedMatchesPlainHmm) {
  std::mt19937_64 rng(22);
  for (double tau : {0.0, 0.3, 0.9}) {
    const HmmModel m = random_model(3, 3, rng);
    const auto obs = random_symbols(40, 3, rng);
    const LabelSequence labels(obs.size(), kNone);
    const SideInfoParams side = make_side_info(tau, 0.7, 3);

    const ForwardPass plain = forward_scaled(m, obs);
    const ForwardPass with = phmm_forward_scaled(m, obs, labels, side);
    EXPECT_EQ(with.alpha_hat, plain.alpha_hat);
    EXPECT_EQ(with.scale, plain.scale);
    EXPECT_NEAR(joint_log_likelihood(m, obs, labels, side) - log_likelihood(m, obs),
                40 * std::log1p(-tau), 1e-9);

    const Eigen::MatrixXd beta_plain = backward_scaled(m, obs, plain.scale);
    const Eigen::MatrixXd beta_with = phmm_backward_scaled(m, obs, labels, side, with.scale);
    EXPECT_EQ(beta_with, beta_plain);
  }
}

TEST(PhmmForward, JointLikelihoodMatchesEnumeration) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 2;
    const std::size_t length = 1 + static_cast<std::size_t>(trial % 6);
    const HmmModel m = random_model(n, 3, rng);
    const auto obs = random_symbols(length, 3, rng);
    const auto labels = random_labels(length, n, rng);
    const SideInfoParams side = random_side(n, rng);
    const double expected = oracle::enumerate_joint(m, obs, oracle::SideChannel{labels, side});
    expect_relative_near(std::exp(joint_log_likelihood(m, obs, labels, side)), expected, 1e-12);
  }
}

TEST(PhmmForward, FullConfidencePinsLabeledStep) {
  std::mt19937_64 rng(24);
  const HmmModel m = random_model(3, 3, rng);
  const auto obs = random_symbols(6, 3, rng);
  const LabelSequence labels{kNone, 2, kNone, kNone, 0, kNone};
  const ForwardPass f = phmm_forward_scaled(m, obs, labels, make_side_info(0.4, 1.0, 3));
  EXPECT_EQ(f.alpha_hat(1, 0), 0.0);
  EXPECT_EQ(f.alpha_hat(1, 1), 0.0);
  EXPECT_EQ(f.alpha_hat(1, 2), 1.0);
  EXPECT_EQ(f.alpha_hat(4, 1), 0.0);
  EXPECT_EQ(f.alpha_hat(4, 2), 0.0);
}

TEST(PhmmBackward, LastRowOneAndAlphaBetaConstant) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 10; ++trial) {
    const HmmModel m = random_model(2, 3, rng);
    const auto obs = random_symbols(4, 3, rng);
    const auto labels = random_labels(4, 2, rng);
    const SideInfoParams side = random_side(2, rng);
    const ScaledTrellis tr = phmm_trellis(m, obs, labels, side);
    for (int i = 0; i < 2; ++i) EXPECT_EQ(tr.beta_hat(3, i), 1.0);
    const double joint = oracle::enumerate_joint(m, obs, oracle::SideChannel{labels, side});
    const double total = std::exp(tr.log_likelihood());
    for (Eigen::Index t = 0; t < 4; ++t) {
      expect_relative_near(tr.alpha_hat.row(t).dot(tr.beta_hat.row(t)) * total, joint, 1e-12);
    }
  }
}

TEST(JointLikelihood, ZeroTauIsPlainLikelihood) {
  std::mt19937_64 rng(26);
  const HmmModel m = random_model(3, 4, rng);
  const auto obs = random_symbols(100, 4, rng);
  const LabelSequence labels(obs.size(), kNone);
  EXPECT_EQ(joint_log_likelihood(m, obs, labels, make_side_info(0.0, 0.9, 3)),
            log_likelihood(m, obs));
}

TEST(JointLikelihood, ShortInstanceMatchesEnumeration) {
  const HmmModel m = random_model(2, 2, std::uint64_t{27});
  const std::vector<int> obs{1, 0, 1};
  const LabelSequence labels{0, kNone, 1};
  const SideInfoParams side = make_side_info(0.5, 0.75, 2);
  expect_relative_near(std::exp(joint_log_likelihood(m, obs, labels, side)),
                       oracle::enumerate_joint(m, obs, oracle::SideChannel{labels, side}),
                       1e-12);
}

TEST(JointLikelihood, CorrectLabelsFavorHigherConfidence) {
  std::mt19937_64 rng(28);
  const HmmModel m = reference_model();
  const auto sample = sample_sequence(m, 200, rng);
  LabelSequence labels(200, kNone);
  for (std::size_t t = 0; t < 200; t += 3) labels[t] = sample.states[t];
  double prev = -std::numeric_limits<double>::infinity();
  for (double p : {0.4, 0.6, 0.8, 0.95, 1.0}) {
    const double ll = joint_log_likelihood(m, sample.symbols, labels, make_side_info(0.33, p, 3));
    EXPECT_GT(ll, prev) << "p = " << p;
    prev = ll;
  }
}

TEST(PhmmPosteriors, FullConfidenceGivesOneHotGamma) {
  std::mt19937_64 rng(29);
  const HmmModel m = random_model(3, 3, rng);
  const auto obs = random_symbols(8, 3, rng);
  const LabelSequence labels{1, kNone, kNone, 2, kNone, 0, kNone, 2};
  const SideInfoParams side = make_side_info(0.5, 1.0, 3);
  const Posteriors post =
      phmm_posteriors(m, obs, labels, side, phmm_trellis(m, obs, labels, side));
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (labels[t] == kNone) continue;
    for (int i = 0; i < 3; ++i) {
      if (i == labels[t]) {
        EXPECT_NEAR(post.gamma(static_cast<Eigen::Index>(t), i), 1.0, 1e-15);
      } else {
        EXPECT_EQ(post.gamma(static_cast<Eigen::Index>(t), i), 0.0);
      }
    }
  }
}

TEST(PhmmPosteriors, AllUnobservedEqualsPlainPosteriors) {
  std::mt19937_64 rng(30);
  const HmmModel m = random_model(3, 3, rng);
  const auto obs = random_symbols(25, 3, rng);
  const LabelSequence labels(obs.size(), kNone);
  const SideInfoParams side = make_side_info(0.6, 0.8, 3);
  const Posteriors plain = posteriors(m, obs, compute_trellis(m, obs));
  const Posteriors with = phmm_posteriors(m, obs, labels, side, phmm_trellis(m, obs, labels, side));
  EXPECT_LE((plain.gamma - with.gamma).cwiseAbs().maxCoeff(), 1e-12);
  for (std::size_t t = 0; t < plain.epsilon.size(); ++t) {
    EXPECT_LE((plain.epsilon[t] - with.epsilon[t]).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PhmmPosteriors, MatchEnumeration) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const HmmModel m = random_model(2, 3, rng);
    const auto obs = random_symbols(4, 3, rng);
    const auto labels = random_labels(4, 2, rng);
    const SideInfoParams side = random_side(2, rng);
    const oracle::SideChannel channel{labels, side};
    const Posteriors post = phmm_posteriors(m, obs, labels, side, phmm_trellis(m, obs, labels, side));
    EXPECT_NEAR(post.epsilon[1](0, 1), oracle::enumerate_posterior(m, obs, channel, 1, 0, 1), 1e-12);
    for (std::size_t t = 0; t < 3; ++t) {
      EXPECT_NEAR(post.epsilon[t].sum(), 1.0, 1e-12);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          EXPECT_NEAR(post.epsilon[t](i, j),
                      oracle::enumerate_posterior(m, obs, channel, t, i, j), 1e-12);
        }
      }
    }
    for (std::size_t t = 0; t < 4; ++t) {
      for (int i = 0; i < 2; ++i) {
        EXPECT_NEAR(post.gamma(static_cast<Eigen::Index>(t), i),
                    oracle::enumerate_state_posterior(m, obs, channel, t, i), 1e-12);
      }
    }
  }
}

TEST(PhmmEmStep, AllUnobservedReducesToBaumWelch) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const HmmModel m = random_model(3, 3, rng);
    const auto obs = random_symbols(40, 3, rng);
    const LabelSequence labels(obs.size(), kNone);
    for (double tau : {0.0, 0.3, 0.9}) {
      for (BUpdateBound bound : {BUpdateBound::Paper, BUpdateBound::Full}) {
        const HmmModel a = baum_welch_step(m, obs, bound);
        const HmmModel b = phmm_em_step(m, obs, labels, make_side_info(tau, 0.6, 3), bound);
        EXPECT_LE((a.A - b.A).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE((a.B - b.B).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE((a.pi - b.pi).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
  }
}

TEST(PhmmEmStep, FullyLabeledIsSupervisedCounting) {
  std::mt19937_64 rng(33);
  const auto sample = sample_sequence(reference_model(), 300, rng);
  const auto& z = sample.states;
  const auto& y = sample.symbols;
  const HmmModel init = random_model(3, 3, rng);

  for (BUpdateBound bound : {BUpdateBound::Paper, BUpdateBound::Full}) {
    HmmModel counted;
    counted.A = Eigen::MatrixXd::Zero(3, 3);
    counted.B = Eigen::MatrixXd::Zero(3, 3);
    counted.pi = Eigen::VectorXd::Zero(3);
    counted.pi(z[0]) = 1.0;
    for (std::size_t t = 0; t + 1 < z.size(); ++t) counted.A(z[t], z[t + 1]) += 1.0;
    const std::size_t emit_end = bound == BUpdateBound::Paper ? z.size() - 1 : z.size();
    for (std::size_t t = 0; t < emit_end; ++t) counted.B(z[t], y[t]) += 1.0;
    for (int i = 0; i < 3; ++i) {
      counted.A.row(i) /= counted.A.row(i).sum();
      counted.B.row(i) /= counted.B.row(i).sum();
    }
    floor_and_renormalize(counted);

    const HmmModel est = phmm_em_step(init, y, z, make_side_info(1.0, 1.0, 3), bound);
    EXPECT_LE((est.A - counted.A).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((est.B - counted.B).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((est.pi - counted.pi).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PhmmEmStep, JointLikelihoodNeverDecreases) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    HmmModel m = random_model(3, 3, rng);
    const auto obs = random_symbols(60, 3, rng);
    const auto labels = random_labels(60, 3, rng);
    const SideInfoParams side = random_side(3, rng);
    double prev = joint_log_likelihood(m, obs, labels, side);
    for (int step = 0; step < 20; ++step) {
      m = phmm_em_step(m, obs, labels, side);
      const double ll = joint_log_likelihood(m, obs, labels, side);
      EXPECT_GE(ll, prev - 1e-10);
      prev = ll;
    }
  }
}

TEST(PhmmEmStep, ContradictoryLabelsAtFullConfidence) {
  HmmModel m;
  m.pi = Eigen::Vector2d(0.5, 0.5);
  m.A = Eigen::Matrix2d::Identity();
  m.B = Eigen::Matrix2d::Constant(0.5);
  const std::vector<int> obs{0, 1, 0};
  const LabelSequence labels{0, 1, kNone};
  try {
    phmm_em_step(m, obs, labels, make_side_info(0.5, 1.0, 2));
    FAIL() << "expected DegenerateLikelihood";
  } catch (const DegenerateLikelihood& e) {
    EXPECT_EQ(e.timestep(), 1u);
  }
  // An unobserved step cannot occur when every state is revealed.
  EXPECT_THROW(joint_log_likelihood(m, obs, LabelSequence{0, kNone, 0},
                                    make_side_info(1.0, 0.9, 2)),
               DegenerateLikelihood);
}

TEST(PhmmEmStep, RejectsMalformedLabels) {
  const HmmModel m = reference_model();
  const std::vector<int> obs{0, 1, 2};
  const SideInfoParams side = make_side_info(0.5, 0.8, 3);
  EXPECT_THROW(phmm_em_step(m, obs, LabelSequence{0, 1}, side), InvalidInput);
  EXPECT_THROW(phmm_em_step(m, obs, LabelSequence{0, 3, kNone}, side), InvalidInput);
  EXPECT_THROW(phmm_em_step(m, obs, LabelSequence{0, 1, 2}, make_side_info(0.5, 0.8, 2)),
               InvalidInput);
}

TEST(PhmmFit, ZeroTauMatchesBaumWelchFit) {
  std::mt19937_64 rng(35);
  const HmmModel init = random_model(3, 3, rng);
  const auto obs = sample_sequence(reference_model(), 250, rng).symbols;
  const LabelSequence labels(obs.size(), kNone);
  const FitReport plain = baum_welch_fit(init, obs);
  const FitReport with = phmm_fit(init, obs, labels, make_side_info(0.0, 0.8, 3));
  EXPECT_EQ(with.iterations_run, plain.iterations_run);
  EXPECT_EQ(with.log_likelihood_trace, plain.log_likelihood_trace);
  EXPECT_EQ(with.final_model.A, plain.final_model.A);
  EXPECT_EQ(with.final_model.B, plain.final_model.B);
}

TEST(PhmmFit, ZeroImprovementConverges) {
  HmmModel m;
  m.pi = Eigen::VectorXd::Ones(1);
  m.A = Eigen::MatrixXd::Ones(1, 1);
  m.B = Eigen::RowVector2d(0.5, 0.5);
  const std::vector<int> obs{0, 1, 1, 0};
  FitOptions opt;
  opt.rel_tol = 0.0;
  const FitReport r = phmm_fit(m, obs, LabelSequence{0, kNone, 0, 0}, make_side_info(0.5, 1.0, 1), opt);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations_run, 1);
}

TEST(PhmmFit, TraceNonDecreasing) {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 10; ++trial) {
    const auto sample = sample_sequence(reference_model(), 250, rng);
    std::mt19937_64 label_rng(trial);
    const auto labels = random_labels(250, 3, label_rng);
    const FitReport r = phmm_fit(random_model(3, 3, rng), sample.symbols, labels,
                                 make_side_info(0.5, 0.8, 3));
    for (std::size_t k = 1; k < r.log_likelihood_trace.size(); ++k) {
      EXPECT_GE(r.log_likelihood_trace[k], r.log_likelihood_trace[k - 1] - 1e-8);
    }
  }
}

TEST(PhmmFit, ExperimentSizedFitIsFast) {
  std::mt19937_64 rng(37);
  const auto sample = sample_sequence(reference_model(), 250, rng);
  const auto labels = random_labels(250, 3, rng);
  const auto start = std::chrono::steady_clock::now();
  phmm_fit(random_model(3, 3, rng), sample.symbols, labels, make_side_info(0.5, 0.8, 3));
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_LT(elapsed.count(), 0.5);
}

}  // namespace
}  // namespace phmm
