#include "phmm/model.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "phmm/errors.hpp"

namespace phmm {
namespace {

using RowRef = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;
using ConstRowRef =
    Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

void check_row(const ConstRowRef& row,
               const std::string& name) {
  for (Eigen::Index k = 0; k < row.size(); ++k) {
    const double v = row(k);
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      std::ostringstream msg;
      msg << name << " entry " << k << " = " << v << " is not in [0, 1]";
      throw InvalidModel(msg.str());
    }
  }
  const double sum = row.sum();
  if (std::abs(sum - 1.0) > kRowSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << name << " sums to " << sum << ", expected 1";
    throw InvalidModel(msg.str());
  }
}

void floor_row(RowRef row, double floor) {
  row = row.cwiseMax(floor);
  row /= row.sum();
}

void dirichlet_row(RowRef row, std::mt19937_64& rng) {
  for (Eigen::Index k = 0; k < row.size(); ++k) {
    row(k) = -std::log1p(-uniform01(rng));
  }
  const double sum = row.sum();
  if (sum > 0.0) {
    row /= sum;
  } else {
    row.setConstant(1.0 / static_cast<double>(row.size()));
  }
}

}  // namespace

void validate_model(const HmmModel& model) {
  const Eigen::Index n = model.pi.size();
  if (n < 1) throw InvalidModel("model has no states");
  if (model.A.rows() != n || model.A.cols() != n) {
    throw InvalidModel("A must be " + std::to_string(n) + "x" +
                       std::to_string(n));
  }
  if (model.B.rows() != n || model.B.cols() < 1) {
    throw InvalidModel("B must have " + std::to_string(n) +
                       " rows and at least one column");
  }
  check_row(model.pi.transpose(), "pi");
  for (Eigen::Index i = 0; i < n; ++i) {
    check_row(model.A.row(i), "A row " + std::to_string(i));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    check_row(model.B.row(i), "B row " + std::to_string(i));
  }
}

void validate_observations(const HmmModel& model, std::span<const int> obs) {
  if (obs.empty()) throw InvalidInput("observation sequence is empty");
  for (std::size_t t = 0; t < obs.size(); ++t) {
    if (obs[t] < 0 || obs[t] >= model.num_symbols()) {
      throw InvalidInput("observation " + std::to_string(t) + " = " +
                         std::to_string(obs[t]) + " is not a symbol in [0, " +
                         std::to_string(model.num_symbols()) + ")");
    }
  }
}

void floor_and_renormalize(HmmModel& model, double floor) {
  Eigen::RowVectorXd pi = model.pi.transpose();
  floor_row(pi, floor);
  model.pi = pi.transpose();
  for (Eigen::Index i = 0; i < model.A.rows(); ++i) floor_row(model.A.row(i), floor);
  for (Eigen::Index i = 0; i < model.B.rows(); ++i) floor_row(model.B.row(i), floor);
}

HmmModel random_model(int num_states, int num_symbols, std::mt19937_64& rng) {
  if (num_states < 1 || num_symbols < 1) {
    throw InvalidInput("model dimensions must be positive");
  }
  HmmModel model;
  Eigen::RowVectorXd pi(num_states);
  dirichlet_row(pi, rng);
  model.pi = pi.transpose();
  model.A.resize(num_states, num_states);
  for (int i = 0; i < num_states; ++i) dirichlet_row(model.A.row(i), rng);
  model.B.resize(num_states, num_symbols);
  for (int i = 0; i < num_states; ++i) dirichlet_row(model.B.row(i), rng);
  floor_and_renormalize(model);
  return model;
}

HmmModel random_model(int num_states, int num_symbols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_model(num_states, num_symbols, rng);
}

HmmModel reference_model() {
  HmmModel model;
  model.pi.resize(3);
  model.pi << 0.3, 0.3, 0.4;
  model.A.resize(3, 3);
  model.A << 0.8, 0.19, 0.01,
             0.01, 0.8, 0.19,
             0.19, 0.01, 0.8;
  model.B.resize(3, 3);
  model.B << 0.6, 0.3, 0.1,
             0.1, 0.6, 0.3,
             0.3, 0.1, 0.6;
  return model;
}

}  // namespace phmm
