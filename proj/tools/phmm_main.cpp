// phmm: train, decode, simulate and benchmark HMMs with partial, noisy state
// labels.
//
// Exit codes: 0 success, 2 malformed input or flags, 3 the data has zero
// probability under the model (or a state lost all occupancy).

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "phmm/bench.hpp"
#include "phmm/errors.hpp"
#include "phmm/hmm.hpp"
#include "phmm/io.hpp"
#include "phmm/side_info.hpp"
#include "phmm/simulate.hpp"

namespace {

constexpr int kExitBadInput = 2;
constexpr int kExitDegenerate = 3;

struct TrainArgs {
  std::string obs;
  std::string side;
  std::optional<double> tau;
  std::optional<double> p_train;
  std::string init;
  int states = 0;
  int symbols = 0;
  int max_iters = 200;
  double rel_tol = 1e-6;
  std::string b_update_bound = "full";
  std::string out;
};

struct DecodeArgs {
  std::string model;
  std::string obs;
  std::string out;
};

struct SimulateArgs {
  std::string model;
  std::size_t length = 0;
  double tau = 0.0;
  double p_true = 1.0;
  std::uint64_t seed = 0;
  std::string out_prefix;
};

struct BenchArgs {
  std::string config;
  std::string out;
  bool emit_gnuplot = false;
  std::optional<int> runs;
  bool full_scale = false;
  unsigned threads = 0;
};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

phmm::HmmModel initial_model(const TrainArgs& args,
                             const phmm::ObservationSequence& obs) {
  const std::string prefix = "random:";
  if (args.init.rfind(prefix, 0) != 0) return phmm::io::load_model(args.init);

  std::uint64_t seed = 0;
  try {
    std::size_t used = 0;
    seed = std::stoull(args.init.substr(prefix.size()), &used);
    if (used != args.init.size() - prefix.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw phmm::InvalidInput("--init expects random:<seed> or a model file");
  }
  if (args.states < 1) throw phmm::InvalidInput("--init random:<seed> needs --states");
  int symbols = args.symbols;
  if (symbols < 1) {
    symbols = obs.empty() ? 1 : *std::max_element(obs.begin(), obs.end()) + 1;
  }
  return phmm::random_model(args.states, symbols, seed);
}

int run_train(const TrainArgs& args) {
  const auto obs = phmm::io::load_sequence(args.obs);
  const phmm::HmmModel init = initial_model(args, obs);
  phmm::validate_model(init);
  phmm::validate_observations(init, obs);

  phmm::FitOptions options;
  options.max_iters = args.max_iters;
  options.rel_tol = args.rel_tol;
  options.b_update_bound = args.b_update_bound == "full" ? phmm::BUpdateBound::Full
                                                         : phmm::BUpdateBound::Paper;

  phmm::FitReport report;
  if (args.side.empty()) {
    report = phmm::baum_welch_fit(init, obs, options);
  } else {
    if (!args.tau || !args.p_train) {
      throw phmm::InvalidInput("--side requires --tau and --p-train");
    }
    const auto labels = phmm::io::load_labels(args.side);
    const auto side = phmm::make_side_info(*args.tau, *args.p_train, init.num_states());
    report = phmm::phmm_fit(init, obs, labels, side, options);
  }
  phmm::io::save_model(report.final_model, args.out);
  std::cout << "log_likelihood " << fmt_double(report.log_likelihood_trace.back()) << "\n"
            << "iterations " << report.iterations_run << "\n"
            << "converged " << (report.converged ? "true" : "false") << "\n";
  return 0;
}

int run_decode(const DecodeArgs& args) {
  const phmm::HmmModel model = phmm::io::load_model(args.model);
  const auto obs = phmm::io::load_sequence(args.obs);
  const phmm::ViterbiPath path = phmm::viterbi(model, obs);
  phmm::io::write_text(args.out, phmm::io::format_sequence(path.states));
  std::cout << "log_prob " << fmt_double(path.log_prob) << "\n";
  return 0;
}

int run_simulate(const SimulateArgs& args) {
  const phmm::HmmModel model = phmm::io::load_model(args.model);
  std::mt19937_64 rng(args.seed);
  const phmm::SampledSequence sample = phmm::sample_sequence(model, args.length, rng);
  const phmm::LabelSequence labels = phmm::corrupt_labels(
      sample.states, args.tau, args.p_true, model.num_states(), rng);
  phmm::io::write_text(args.out_prefix + ".states", phmm::io::format_sequence(sample.states));
  phmm::io::write_text(args.out_prefix + ".obs", phmm::io::format_sequence(sample.symbols));
  phmm::io::write_text(args.out_prefix + ".side", phmm::io::format_labels(labels));
  return 0;
}

int run_bench(const BenchArgs& args) {
  phmm::bench::ExperimentConfig config = phmm::bench::load_config(args.config);
  if (args.full_scale) config.num_runs = 500;
  if (args.runs) config.num_runs = *args.runs;
  phmm::bench::validate_config(config);
  const auto rows = phmm::bench::run_experiment(config, args.threads);
  phmm::io::write_text(args.out, phmm::bench::to_csv(rows));
  if (args.emit_gnuplot) {
    const std::filesystem::path csv(args.out);
    phmm::io::write_text(args.out + ".gp",
                         phmm::bench::gnuplot_script(rows, csv.filename().string()));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HMM training with partial and noisy state labels"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Fit a model by EM");
  train_cmd->add_option("--obs", train.obs, "Observation file")->required();
  train_cmd->add_option("--side", train.side, "Side-information label file");
  train_cmd->add_option("--tau", train.tau, "Label reveal probability")
      ->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--p-train", train.p_train, "Confidence in revealed labels")
      ->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--init", train.init, "random:<seed> or a model file")->required();
  train_cmd->add_option("--states", train.states, "State count for random init");
  train_cmd->add_option("--symbols", train.symbols,
                        "Symbol count for random init (default: max symbol + 1)");
  train_cmd->add_option("--max-iters", train.max_iters)->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--rel-tol", train.rel_tol)->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--b-update-bound", train.b_update_bound)
      ->capture_default_str()
      ->check(CLI::IsMember({"paper", "full"}));
  train_cmd->add_option("--out", train.out, "Output model file")->required();

  DecodeArgs decode;
  auto* decode_cmd = app.add_subcommand("decode", "Viterbi-decode a sequence");
  decode_cmd->add_option("--model", decode.model)->required();
  decode_cmd->add_option("--obs", decode.obs)->required();
  decode_cmd->add_option("--out", decode.out)->required();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Sample states, observations and labels");
  sim_cmd->add_option("--model", sim.model)->required();
  sim_cmd->add_option("--length", sim.length)->required()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--tau", sim.tau)->required()->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--p-true", sim.p_true)->required()->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--seed", sim.seed)->required();
  sim_cmd->add_option("--out-prefix", sim.out_prefix,
                      "Writes <prefix>.states, <prefix>.obs and <prefix>.side")
      ->required();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a Monte Carlo recognition sweep");
  bench_cmd->add_option("--config", bench.config, "Experiment config (JSON)")->required();
  bench_cmd->add_option("--out", bench.out, "Output CSV")->required();
  bench_cmd->add_flag("--emit-gnuplot", bench.emit_gnuplot,
                      "Also write <out>.gp plotting the CSV");
  bench_cmd->add_option("--runs", bench.runs, "Override num_runs")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--full-scale", bench.full_scale, "Use 500 runs per cell");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }

  try {
    if (*train_cmd) return run_train(train);
    if (*decode_cmd) return run_decode(decode);
    if (*sim_cmd) return run_simulate(sim);
    if (*bench_cmd) return run_bench(bench);
  } catch (const phmm::DegenerateLikelihood& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const phmm::DegenerateStatistics& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const phmm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
