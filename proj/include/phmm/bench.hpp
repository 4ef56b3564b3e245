#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phmm/hmm.hpp"
#include "phmm/model.hpp"

namespace phmm::bench {

enum class PermutationMode { Raw, BestPermutation };

enum class Method { Phmm = 0, Baseline = 1, Oracle = 2, Limit = 3 };
inline constexpr std::array<Method, 4> kMethods = {
    Method::Phmm, Method::Baseline, Method::Oracle, Method::Limit};

const char* method_name(Method m);

/// A Monte Carlo sweep over (tau, p_true, p_train).
struct ExperimentConfig {
  HmmModel true_model;
  int train_length = 250;
  int test_length = 500;
  int num_runs = 100;
  std::vector<double> tau_grid;
  std::vector<double> p_true_grid;
  /// p_train_grid[k] lists the confidences tried for p_true_grid[k].
  std::vector<std::vector<double>> p_train_grid;
  std::uint64_t master_seed = 1;
  FitOptions em;
  PermutationMode permutation_mode = PermutationMode::BestPermutation;
};

void validate_config(const ExperimentConfig& config);

/// Field names mirror ExperimentConfig; "em_stop" holds max_iters/rel_tol.
/// Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Reference-model sweep over tau 0..0.6 and three label-accuracy levels.
ExperimentConfig reference_sweep_config();

struct MethodError {
  double raw = 0.0;
  /// Minimum over all relabelings of the decoded states.
  double permuted = 0.0;
};

struct ReplicateResult {
  bool failed = false;
  std::string failure;
  std::array<MethodError, 4> errors{};
  /// Error under the configured permutation mode, indexed by Method.
  std::array<double, 4> reported{};
};

/// Replicate seed r of a sweep; stream seeds for test data, training data,
/// label corruption and EM initialization are derived from it.
std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t replicate);

ReplicateResult run_single_replicate(const ExperimentConfig& config,
                                     double tau, double p_true, double p_train,
                                     std::uint64_t seed);

struct ResultRow {
  double tau = 0.0;
  double p_true = 0.0;
  double p_train = 0.0;
  Method method = Method::Phmm;
  double mean_error_rate = 0.0;
  double std_error = 0.0;
  /// NaN when undefined (baseline/oracle rows, or an empty margin).
  double margin_gain_fraction = 0.0;
  int runs = 0;
  int failed_runs = 0;
};

/// One row per method per grid cell, ordered by p_true, p_train, tau,
/// method. Replicate r of every cell uses replicate_seed(master_seed, r), so
/// the output depends only on the config, not on threads.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      unsigned threads = 0);

/// (baseline_err - method_err) / (baseline_err - oracle_err). Throws
/// UndefinedMargin if baseline_err <= oracle_err.
double margin_gain(double baseline_err, double oracle_err, double method_err);

/// Fraction of mismatched positions.
double error_rate(std::span<const int> decoded, std::span<const int> truth);

/// Minimum error_rate over all relabelings of the decoded states.
double permuted_error_rate(std::span<const int> decoded,
                           std::span<const int> truth, int num_states);

inline constexpr const char* kCsvHeader =
    "tau,p_true,p_train,method,mean_error_rate,std_error,"
    "margin_gain_fraction,runs,failed_runs";

std::string to_csv(const std::vector<ResultRow>& rows);

/// Gnuplot script plotting mean error against tau for every
/// (p_true, p_train, method) series of the given CSV.
std::string gnuplot_script(const std::vector<ResultRow>& rows,
                           const std::string& csv_name);

}  // namespace phmm::bench
