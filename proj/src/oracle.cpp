#include "phmm/oracle.hpp"

#include <algorithm>
#include <string>

#include "phmm/errors.hpp"

namespace phmm::oracle {
namespace {

// Independent transcription of the label channel P(x | z).
double label_probability(int label, int state, const SideInfoParams& side) {
  if (label == kUnobserved) return 1.0 - side.tau;
  if (label == state) return side.tau * side.p;
  return side.tau * (1.0 - side.p) / (side.num_states - 1.0);
}

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// Visits every path in order of increasing (z_T, z_{T-1}, ..., z_1), i.e.
// z_1 is the fastest-moving digit.
template <typename Visit>
void for_each_path(int num_states, std::size_t length, Visit&& visit) {
  if (length == 0) throw InvalidInput("sequence is empty");
  std::uint64_t count = 1;
  for (std::size_t t = 0; t < length; ++t) {
    count *= static_cast<std::uint64_t>(num_states);
    if (count > kMaxPaths) {
      throw InstanceTooLarge(std::to_string(num_states) + "^" +
                             std::to_string(length) +
                             " paths exceeds the enumeration limit");
    }
  }
  std::vector<int> path(length, 0);
  for (std::uint64_t k = 0; k < count; ++k) {
    visit(std::span<const int>(path));
    for (std::size_t t = 0; t < length; ++t) {
      if (++path[t] < num_states) break;
      path[t] = 0;
    }
  }
}

}  // namespace

double path_probability(const HmmModel& model, std::span<const int> obs,
                        const std::optional<SideChannel>& side,
                        std::span<const int> path) {
  double prob = model.pi(path[0]) * model.B(path[0], obs[0]);
  if (side) prob *= label_probability(side->labels[0], path[0], side->params);
  for (std::size_t t = 1; t < obs.size(); ++t) {
    prob *= model.A(path[t - 1], path[t]) * model.B(path[t], obs[t]);
    if (side) prob *= label_probability(side->labels[t], path[t], side->params);
  }
  return prob;
}

double enumerate_joint(const HmmModel& model, std::span<const int> obs,
                       const std::optional<SideChannel>& side) {
  KahanSum total;
  for_each_path(model.num_states(), obs.size(), [&](std::span<const int> z) {
    total.add(path_probability(model, obs, side, z));
  });
  return total.sum;
}

double enumerate_posterior(const HmmModel& model, std::span<const int> obs,
                           const std::optional<SideChannel>& side,
                           std::size_t t, int i, int j) {
  if (t + 1 >= obs.size()) throw InvalidInput("transition index out of range");
  KahanSum total;
  KahanSum hit;
  for_each_path(model.num_states(), obs.size(), [&](std::span<const int> z) {
    const double p = path_probability(model, obs, side, z);
    total.add(p);
    if (z[t] == i && z[t + 1] == j) hit.add(p);
  });
  return hit.sum / total.sum;
}

double enumerate_state_posterior(const HmmModel& model,
                                 std::span<const int> obs,
                                 const std::optional<SideChannel>& side,
                                 std::size_t t, int i) {
  if (t >= obs.size()) throw InvalidInput("time index out of range");
  KahanSum total;
  KahanSum hit;
  for_each_path(model.num_states(), obs.size(), [&](std::span<const int> z) {
    const double p = path_probability(model, obs, side, z);
    total.add(p);
    if (z[t] == i) hit.add(p);
  });
  return hit.sum / total.sum;
}

BestPath enumerate_best_path(const HmmModel& model, std::span<const int> obs) {
  double top = 0.0;
  for_each_path(model.num_states(), obs.size(), [&](std::span<const int> z) {
    top = std::max(top, path_probability(model, obs, std::nullopt, z));
  });
  // Enumeration runs in the tie-break order, so the first path within the
  // tie tolerance of the maximum wins.
  BestPath best;
  for_each_path(model.num_states(), obs.size(), [&](std::span<const int> z) {
    if (!best.states.empty()) return;
    const double p = path_probability(model, obs, std::nullopt, z);
    if (p >= top * (1.0 - kViterbiTieTolerance)) {
      best.prob = p;
      best.states.assign(z.begin(), z.end());
    }
  });
  return best;
}

}  // namespace phmm::oracle
