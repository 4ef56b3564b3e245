#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "phmm/model.hpp"
#include "phmm/side_info.hpp"

namespace phmm::testing {

inline std::vector<int> random_symbols(std::size_t length, int num_symbols,
                                       std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(0, num_symbols - 1);
  std::vector<int> out(length);
  for (auto& v : out) v = dist(rng);
  return out;
}

/// Roughly half the positions unobserved, the rest uniform over states.
inline LabelSequence random_labels(std::size_t length, int num_states,
                                   std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(0, num_states - 1);
  std::bernoulli_distribution hidden(0.5);
  LabelSequence out(length);
  for (auto& v : out) v = hidden(rng) ? kUnobserved : dist(rng);
  return out;
}

inline SideInfoParams random_side(int num_states, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> tau(0.05, 0.95);
  std::uniform_real_distribution<double> p(0.05, 0.95);
  return make_side_info(tau(rng), p(rng), num_states);
}

/// pi = (1, 0), A swaps states, B given.
inline HmmModel alternating_model(const Eigen::MatrixXd& emissions) {
  HmmModel m;
  m.pi = Eigen::Vector2d(1.0, 0.0);
  m.A.resize(2, 2);
  m.A << 0.0, 1.0, 1.0, 0.0;
  m.B = emissions;
  return m;
}

inline void expect_relative_near(double actual, double expected, double rel) {
  EXPECT_LE(std::abs(actual - expected), rel * std::abs(expected))
      << "actual " << actual << " expected " << expected;
}

}  // namespace phmm::testing
