#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phmm/bench.hpp"
#include "phmm/errors.hpp"
#include "phmm/hmm.hpp"
#include "phmm/io.hpp"
#include "phmm/side_info.hpp"
#include "phmm/simulate.hpp"

namespace py = pybind11;
using namespace phmm;

namespace {

BUpdateBound parse_bound(const std::string& s) {
  if (s == "full") return BUpdateBound::Full;
  if (s == "paper") return BUpdateBound::Paper;
  throw InvalidInput("b_update_bound must be 'paper' or 'full'");
}

FitOptions fit_options(int max_iters, double rel_tol, const std::string& bound) {
  FitOptions opt;
  opt.max_iters = max_iters;
  opt.rel_tol = rel_tol;
  opt.b_update_bound = parse_bound(bound);
  return opt;
}

HmmModel make_model(Eigen::VectorXd pi, Eigen::MatrixXd a, Eigen::MatrixXd b) {
  HmmModel m{std::move(pi), std::move(a), std::move(b)};
  validate_model(m);
  return m;
}

py::dict row_to_dict(const bench::ResultRow& r) {
  py::dict d;
  d["tau"] = r.tau;
  d["p_true"] = r.p_true;
  d["p_train"] = r.p_train;
  d["method"] = bench::method_name(r.method);
  d["mean_error_rate"] = r.mean_error_rate;
  d["std_error"] = r.std_error;
  d["margin_gain_fraction"] = r.margin_gain_fraction;
  d["runs"] = r.runs;
  d["failed_runs"] = r.failed_runs;
  return d;
}

}  // namespace

PYBIND11_MODULE(_phmm, m) {
  m.doc() = "HMM training with partial, noisy state labels.";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidModel>(m, "InvalidModel", error.ptr());
  py::register_exception<InvalidInput>(m, "InvalidInput", error.ptr());
  py::register_exception<DegenerateLikelihood>(m, "DegenerateLikelihood", error.ptr());
  py::register_exception<DegenerateStatistics>(m, "DegenerateStatistics", error.ptr());
  py::register_exception<UndefinedMargin>(m, "UndefinedMargin", error.ptr());

  m.attr("UNOBSERVED") = kUnobserved;

  py::class_<HmmModel>(m, "HmmModel")
      .def(py::init(&make_model), py::arg("pi"), py::arg("A"), py::arg("B"))
      .def_readwrite("pi", &HmmModel::pi)
      .def_readwrite("A", &HmmModel::A)
      .def_readwrite("B", &HmmModel::B)
      .def_property_readonly("num_states", &HmmModel::num_states)
      .def_property_readonly("num_symbols", &HmmModel::num_symbols)
      .def("validate", [](const HmmModel& self) { validate_model(self); })
      .def("to_json", [](const HmmModel& self) { return io::model_to_json(self).dump(2); })
      .def_static("from_json", [](const std::string& text) {
        try {
          return io::model_from_json(nlohmann::json::parse(text));
        } catch (const nlohmann::json::parse_error& e) {
          throw InvalidInput(e.what());
        }
      })
      .def("__repr__", [](const HmmModel& self) {
        return "<HmmModel states=" + std::to_string(self.num_states()) +
               " symbols=" + std::to_string(self.num_symbols()) + ">";
      });

  m.def("reference_model", &reference_model);
  m.def("random_model", py::overload_cast<int, int, std::uint64_t>(&random_model),
        py::arg("num_states"), py::arg("num_symbols"), py::arg("seed"));

  m.def(
      "sample_sequence",
      [](const HmmModel& model, std::size_t length, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        const SampledSequence s = sample_sequence(model, length, rng);
        return py::make_tuple(s.states, s.symbols);
      },
      py::arg("model"), py::arg("length"), py::arg("seed"),
      "Returns (states, symbols).");

  m.def(
      "forward_scaled",
      [](const HmmModel& model, const std::vector<int>& obs) {
        const ForwardPass f = forward_scaled(model, obs);
        return py::make_tuple(f.alpha_hat, f.scale);
      },
      py::arg("model"), py::arg("obs"), "Returns (alpha_hat, scale).");
  m.def(
      "log_likelihood",
      [](const HmmModel& model, const std::vector<int>& obs) { return log_likelihood(model, obs); },
      py::arg("model"), py::arg("obs"));
  m.def(
      "viterbi",
      [](const HmmModel& model, const std::vector<int>& obs) {
        const ViterbiPath p = viterbi(model, obs);
        return py::make_tuple(p.states, p.log_prob);
      },
      py::arg("model"), py::arg("obs"), "Returns (states, log_prob).");

  py::class_<FitReport>(m, "FitReport")
      .def_readonly("final_model", &FitReport::final_model)
      .def_readonly("log_likelihood_trace", &FitReport::log_likelihood_trace)
      .def_readonly("iterations_run", &FitReport::iterations_run)
      .def_readonly("converged", &FitReport::converged);

  m.def(
      "baum_welch_step",
      [](const HmmModel& model, const std::vector<int>& obs, const std::string& bound) {
        return baum_welch_step(model, obs, parse_bound(bound));
      },
      py::arg("model"), py::arg("obs"), py::arg("b_update_bound") = "full");
  m.def(
      "baum_welch_fit",
      [](const HmmModel& init, const std::vector<int>& obs, int max_iters, double rel_tol,
         const std::string& bound) {
        return baum_welch_fit(init, obs, fit_options(max_iters, rel_tol, bound));
      },
      py::arg("init"), py::arg("obs"), py::arg("max_iters") = 200, py::arg("rel_tol") = 1e-6,
      py::arg("b_update_bound") = "full");

  py::class_<SideInfoParams>(m, "SideInfoParams")
      .def(py::init(&make_side_info), py::arg("tau"), py::arg("p"), py::arg("num_states"))
      .def_readonly("tau", &SideInfoParams::tau)
      .def_readonly("p", &SideInfoParams::p)
      .def_readonly("num_states", &SideInfoParams::num_states);

  m.def("nu", &nu, py::arg("label"), py::arg("state"), py::arg("side"));
  m.def(
      "joint_log_likelihood",
      [](const HmmModel& model, const std::vector<int>& obs, const LabelSequence& labels,
         const SideInfoParams& side) { return joint_log_likelihood(model, obs, labels, side); },
      py::arg("model"), py::arg("obs"), py::arg("labels"), py::arg("side"));
  m.def(
      "phmm_em_step",
      [](const HmmModel& model, const std::vector<int>& obs, const LabelSequence& labels,
         const SideInfoParams& side, const std::string& bound) {
        return phmm_em_step(model, obs, labels, side, parse_bound(bound));
      },
      py::arg("model"), py::arg("obs"), py::arg("labels"), py::arg("side"),
      py::arg("b_update_bound") = "full");
  m.def(
      "phmm_fit",
      [](const HmmModel& init, const std::vector<int>& obs, const LabelSequence& labels,
         const SideInfoParams& side, int max_iters, double rel_tol, const std::string& bound) {
        return phmm_fit(init, obs, labels, side, fit_options(max_iters, rel_tol, bound));
      },
      py::arg("init"), py::arg("obs"), py::arg("labels"), py::arg("side"),
      py::arg("max_iters") = 200, py::arg("rel_tol") = 1e-6, py::arg("b_update_bound") = "full");

  m.def(
      "corrupt_labels",
      [](const StateSequence& truth, double tau, double p_true, int num_states,
         std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        return corrupt_labels(truth, tau, p_true, num_states, rng);
      },
      py::arg("truth"), py::arg("tau"), py::arg("p_true"), py::arg("num_states"), py::arg("seed"));

  m.def("margin_gain", &bench::margin_gain, py::arg("baseline_err"), py::arg("oracle_err"),
        py::arg("method_err"));
  m.def(
      "run_experiment",
      [](const std::string& config_json, unsigned threads) {
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(config_json);
        } catch (const nlohmann::json::parse_error& e) {
          throw InvalidInput(e.what());
        }
        const bench::ExperimentConfig config = bench::config_from_json(doc);
        std::vector<bench::ResultRow> rows;
        {
          py::gil_scoped_release release;
          rows = bench::run_experiment(config, threads);
        }
        py::list out;
        for (const auto& r : rows) out.append(row_to_dict(r));
        return out;
      },
      py::arg("config_json"), py::arg("threads") = 0,
      "Runs a sweep described by a JSON config; returns one dict per CSV row.");
}
