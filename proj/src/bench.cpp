#include "phmm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "phmm/errors.hpp"
#include "phmm/io.hpp"
#include "phmm/side_info.hpp"
#include "phmm/simulate.hpp"

namespace phmm::bench {
namespace {

using nlohmann::json;

enum Stream : std::uint64_t { kTestData = 1, kTrainData = 2, kLabels = 3, kInit = 4 };

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 stream_rng(std::uint64_t seed, Stream stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

bool any_observed(const LabelSequence& labels) {
  return std::any_of(labels.begin(), labels.end(),
                     [](int x) { return x != kUnobserved; });
}

MethodError score(const HmmModel& model, const ObservationSequence& obs,
                  const StateSequence& truth) {
  const ViterbiPath path = viterbi(model, obs);
  return {error_rate(path.states, truth),
          permuted_error_rate(path.states, truth, model.num_states())};
}

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw InvalidInput(std::string(name) + " values must lie in [0, 1]");
  }
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

template <typename T>
T get_field(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config field '") + key + "': " + e.what());
  }
}

struct Cell {
  double tau;
  double p_true;
  double p_train;
};

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::Phmm: return "phmm";
    case Method::Baseline: return "baseline";
    case Method::Oracle: return "oracle";
    case Method::Limit: return "limit";
  }
  return "?";
}

void validate_config(const ExperimentConfig& config) {
  validate_model(config.true_model);
  if (config.train_length < 2 || config.test_length < 1) {
    throw InvalidInput("train_length must be >= 2 and test_length >= 1");
  }
  if (config.num_runs < 1) throw InvalidInput("num_runs must be positive");
  if (config.tau_grid.empty() || config.p_true_grid.empty()) {
    throw InvalidInput("tau_grid and p_true_grid must be non-empty");
  }
  if (config.p_train_grid.size() != config.p_true_grid.size()) {
    throw InvalidInput("p_train_grid needs one list per p_true value");
  }
  for (double v : config.tau_grid) check_unit(v, "tau");
  for (double v : config.p_true_grid) check_unit(v, "p_true");
  for (const auto& list : config.p_train_grid) {
    if (list.empty()) throw InvalidInput("every p_train list must be non-empty");
    for (double v : list) check_unit(v, "p_train");
  }
  if (config.true_model.num_states() < 2) {
    throw InvalidInput("experiments need at least two states");
  }
  if (config.em.max_iters < 0 || !(config.em.rel_tol >= 0.0)) {
    throw InvalidInput("em_stop values must be non-negative");
  }
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidInput("config must be a JSON object");
  static const std::set<std::string> known = {
      "true_model", "train_length",   "test_length",    "num_runs",
      "tau_grid",   "p_true_grid",    "p_train_grid",   "master_seed",
      "em_stop",    "b_update_bound", "permutation_mode"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw InvalidInput("unknown config field '" + key + "'");
  }
  for (const char* key : {"tau_grid", "p_true_grid", "p_train_grid"}) {
    if (!doc.contains(key)) {
      throw InvalidInput(std::string("config is missing '") + key + "'");
    }
  }

  ExperimentConfig config;
  config.true_model = doc.contains("true_model")
                          ? io::model_from_json(doc["true_model"])
                          : reference_model();
  if (doc.contains("train_length")) config.train_length = get_field<int>(doc, "train_length");
  if (doc.contains("test_length")) config.test_length = get_field<int>(doc, "test_length");
  if (doc.contains("num_runs")) config.num_runs = get_field<int>(doc, "num_runs");
  config.tau_grid = get_field<std::vector<double>>(doc, "tau_grid");
  config.p_true_grid = get_field<std::vector<double>>(doc, "p_true_grid");
  config.p_train_grid = get_field<std::vector<std::vector<double>>>(doc, "p_train_grid");
  if (doc.contains("master_seed")) {
    config.master_seed = get_field<std::uint64_t>(doc, "master_seed");
  }
  if (doc.contains("em_stop")) {
    const json& stop = doc["em_stop"];
    if (!stop.is_object()) throw InvalidInput("em_stop must be an object");
    for (const auto& [key, value] : stop.items()) {
      if (key != "max_iters" && key != "rel_tol") {
        throw InvalidInput("unknown em_stop field '" + key + "'");
      }
    }
    if (stop.contains("max_iters")) config.em.max_iters = get_field<int>(stop, "max_iters");
    if (stop.contains("rel_tol")) config.em.rel_tol = get_field<double>(stop, "rel_tol");
  }
  if (doc.contains("b_update_bound")) {
    const auto s = get_field<std::string>(doc, "b_update_bound");
    if (s == "paper") {
      config.em.b_update_bound = BUpdateBound::Paper;
    } else if (s == "full") {
      config.em.b_update_bound = BUpdateBound::Full;
    } else {
      throw InvalidInput("b_update_bound must be 'paper' or 'full'");
    }
  }
  if (doc.contains("permutation_mode")) {
    const auto s = get_field<std::string>(doc, "permutation_mode");
    if (s == "raw") {
      config.permutation_mode = PermutationMode::Raw;
    } else if (s == "best-permutation") {
      config.permutation_mode = PermutationMode::BestPermutation;
    } else {
      throw InvalidInput("permutation_mode must be 'raw' or 'best-permutation'");
    }
  }
  validate_config(config);
  return config;
}

json config_to_json(const ExperimentConfig& config) {
  json doc;
  doc["true_model"] = io::model_to_json(config.true_model);
  doc["train_length"] = config.train_length;
  doc["test_length"] = config.test_length;
  doc["num_runs"] = config.num_runs;
  doc["tau_grid"] = config.tau_grid;
  doc["p_true_grid"] = config.p_true_grid;
  doc["p_train_grid"] = config.p_train_grid;
  doc["master_seed"] = config.master_seed;
  doc["em_stop"] = {{"max_iters", config.em.max_iters},
                    {"rel_tol", config.em.rel_tol}};
  doc["b_update_bound"] =
      config.em.b_update_bound == BUpdateBound::Paper ? "paper" : "full";
  doc["permutation_mode"] = config.permutation_mode == PermutationMode::Raw
                                ? "raw"
                                : "best-permutation";
  return doc;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(io::read_text(path));
  } catch (const json::parse_error& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

ExperimentConfig reference_sweep_config() {
  ExperimentConfig config;
  config.true_model = reference_model();
  config.tau_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  config.p_true_grid = {0.6, 0.8, 1.0};
  config.p_train_grid = {{0.55, 0.6, 0.65, 1.0}, {0.75, 0.8, 0.85, 1.0}, {1.0, 0.5}};
  return config;
}

std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t replicate) {
  return splitmix64(master_seed ^ splitmix64(replicate + 0x5EEDULL));
}

double error_rate(std::span<const int> decoded, std::span<const int> truth) {
  if (decoded.size() != truth.size() || truth.empty()) {
    throw InvalidInput("decoded and true sequences must have equal, non-zero length");
  }
  std::size_t wrong = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) wrong += decoded[t] != truth[t];
  return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

double permuted_error_rate(std::span<const int> decoded,
                           std::span<const int> truth, int num_states) {
  if (decoded.size() != truth.size() || truth.empty()) {
    throw InvalidInput("decoded and true sequences must have equal, non-zero length");
  }
  std::vector<int> perm(static_cast<std::size_t>(num_states));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = truth.size();
  do {
    std::size_t wrong = 0;
    for (std::size_t t = 0; t < truth.size(); ++t) {
      wrong += perm[static_cast<std::size_t>(decoded[t])] != truth[t];
    }
    best = std::min(best, wrong);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(truth.size());
}

double margin_gain(double baseline_err, double oracle_err, double method_err) {
  if (!(baseline_err > oracle_err)) {
    throw UndefinedMargin("baseline error does not exceed oracle error");
  }
  return (baseline_err - method_err) / (baseline_err - oracle_err);
}

ReplicateResult run_single_replicate(const ExperimentConfig& config, double tau,
                                     double p_true, double p_train,
                                     std::uint64_t seed) {
  const HmmModel& truth_model = config.true_model;
  const int n = truth_model.num_states();

  auto test_rng = stream_rng(seed, kTestData);
  auto train_rng = stream_rng(seed, kTrainData);
  auto init_rng = stream_rng(seed, kInit);
  const SampledSequence test =
      sample_sequence(truth_model, static_cast<std::size_t>(config.test_length), test_rng);
  const SampledSequence train =
      sample_sequence(truth_model, static_cast<std::size_t>(config.train_length), train_rng);
  // Both label sequences come from the same uniforms, so they reveal the
  // same positions and differ only in label noise.
  auto label_rng = stream_rng(seed, kLabels);
  const LabelSequence labels = corrupt_labels(train.states, tau, p_true, n, label_rng);
  label_rng = stream_rng(seed, kLabels);
  const LabelSequence exact_labels = corrupt_labels(train.states, tau, 1.0, n, label_rng);
  const HmmModel init = random_model(n, truth_model.num_symbols(), init_rng);

  ReplicateResult result;
  const auto idx = [](Method m) { return static_cast<std::size_t>(m); };
  try {
    result.errors[idx(Method::Oracle)] = score(truth_model, test.symbols, test.states);
    const FitReport baseline = baum_welch_fit(init, train.symbols, config.em);
    const FitReport phmm = phmm_fit(init, train.symbols, labels,
                                    make_side_info(tau, p_train, n), config.em);
    const FitReport limit = phmm_fit(init, train.symbols, exact_labels,
                                     make_side_info(tau, 1.0, n), config.em);
    result.errors[idx(Method::Baseline)] =
        score(baseline.final_model, test.symbols, test.states);
    result.errors[idx(Method::Phmm)] = score(phmm.final_model, test.symbols, test.states);
    result.errors[idx(Method::Limit)] = score(limit.final_model, test.symbols, test.states);
  } catch (const DegenerateLikelihood& e) {
    result.failed = true;
    result.failure = e.what();
    return result;
  } catch (const DegenerateStatistics& e) {
    result.failed = true;
    result.failure = e.what();
    return result;
  }

  // Fits without any revealed label have arbitrary state identities and are
  // scored up to relabeling; revealed labels pin the identities.
  const bool permute = config.permutation_mode == PermutationMode::BestPermutation;
  const bool anchored = any_observed(labels);
  for (Method m : kMethods) {
    const MethodError& e = result.errors[idx(m)];
    bool use_permuted = false;
    if (permute) {
      use_permuted = m == Method::Baseline ||
                     ((m == Method::Phmm || m == Method::Limit) && !anchored);
    }
    result.reported[idx(m)] = use_permuted ? e.permuted : e.raw;
  }
  return result;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      unsigned threads) {
  validate_config(config);
  std::vector<Cell> cells;
  for (std::size_t k = 0; k < config.p_true_grid.size(); ++k) {
    for (double p_train : config.p_train_grid[k]) {
      for (double tau : config.tau_grid) {
        cells.push_back({tau, config.p_true_grid[k], p_train});
      }
    }
  }

  const std::size_t runs = static_cast<std::size_t>(config.num_runs);
  const std::size_t total = cells.size() * runs;
  std::vector<ReplicateResult> results(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const Cell& cell = cells[task / runs];
      results[task] = run_single_replicate(
          config, cell.tau, cell.p_true, cell.p_train,
          replicate_seed(config.master_seed, task % runs));
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  }

  std::vector<ResultRow> rows;
  rows.reserve(cells.size() * kMethods.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto first = results.begin() + static_cast<std::ptrdiff_t>(c * runs);
    const std::span<const ReplicateResult> cell_results(first, first + static_cast<std::ptrdiff_t>(runs));
    int failed = 0;
    for (const auto& r : cell_results) failed += r.failed;
    const int ok = static_cast<int>(runs) - failed;

    std::array<double, 4> mean{};
    std::array<double, 4> se{};
    for (Method m : kMethods) {
      const auto i = static_cast<std::size_t>(m);
      double sum = 0.0;
      for (const auto& r : cell_results) {
        if (!r.failed) sum += r.reported[i];
      }
      mean[i] = ok > 0 ? sum / ok : std::numeric_limits<double>::quiet_NaN();
      double ss = 0.0;
      for (const auto& r : cell_results) {
        if (!r.failed) ss += (r.reported[i] - mean[i]) * (r.reported[i] - mean[i]);
      }
      se[i] = ok > 1 ? std::sqrt(ss / (ok - 1)) / std::sqrt(static_cast<double>(ok)) : 0.0;
    }

    const double base = mean[static_cast<std::size_t>(Method::Baseline)];
    const double orac = mean[static_cast<std::size_t>(Method::Oracle)];
    for (Method m : kMethods) {
      const auto i = static_cast<std::size_t>(m);
      ResultRow row;
      row.tau = cells[c].tau;
      row.p_true = cells[c].p_true;
      row.p_train = cells[c].p_train;
      row.method = m;
      row.mean_error_rate = mean[i];
      row.std_error = se[i];
      row.margin_gain_fraction = std::numeric_limits<double>::quiet_NaN();
      if ((m == Method::Phmm || m == Method::Limit) && ok > 0 && base > orac) {
        row.margin_gain_fraction = margin_gain(base, orac, mean[i]);
      }
      row.runs = ok;
      row.failed_runs = failed;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += format_number(r.tau) + ',' + format_number(r.p_true) + ',' +
           format_number(r.p_train) + ',' + method_name(r.method) + ',' +
           format_number(r.mean_error_rate) + ',' + format_number(r.std_error) +
           ',' + format_number(r.margin_gain_fraction) + ',' +
           std::to_string(r.runs) + ',' + std::to_string(r.failed_runs) + '\n';
  }
  return out;
}

std::string gnuplot_script(const std::vector<ResultRow>& rows,
                           const std::string& csv_name) {
  std::set<std::pair<double, double>> series;
  std::set<double> p_trues;
  for (const auto& r : rows) {
    series.insert({r.p_true, r.p_train});
    p_trues.insert(r.p_true);
  }
  std::ostringstream gp;
  gp << "# Mean state-recognition error against tau.\n"
     << "set datafile separator ','\n"
     << "set key outside right\n"
     << "set xlabel 'tau'\n"
     << "set ylabel 'state recognition error rate'\n"
     << "set terminal pngcairo size " << 600 * p_trues.size() << ",450\n"
     << "set output '" << csv_name << ".png'\n"
     << "set multiplot layout 1," << p_trues.size() << "\n";
  for (double p_true : p_trues) {
    gp << "set title 'p_{true} = " << format_number(p_true) << "'\n"
       << "plot ";
    bool first = true;
    auto add = [&](const std::string& method, double p_train, const std::string& title) {
      if (!first) gp << ", \\\n     ";
      first = false;
      gp << "'" << csv_name << "' skip 1 using 1:((strcol(4) eq '" << method
         << "' && abs($2-" << format_number(p_true) << ")<1e-9 && abs($3-"
         << format_number(p_train) << ")<1e-9) ? $5 : 1/0) with linespoints title '"
         << title << "'";
    };
    double any_train = 0.0;
    for (const auto& [pt, p_train] : series) {
      if (pt != p_true) continue;
      any_train = p_train;
      add("phmm", p_train, "p_{train} = " + format_number(p_train));
    }
    add("baseline", any_train, "Baseline");
    add("oracle", any_train, "Oracle");
    add("limit", any_train, "Limit of Algorithm");
    gp << "\n";
  }
  gp << "unset multiplot\n";
  return gp.str();
}

}  // namespace phmm::bench
