#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ordcollab/cli.hpp"
#include "ordcollab/error.hpp"
#include "ordcollab/experiment.hpp"
#include "ordcollab/synth.hpp"
#include "ordcollab/version.hpp"

namespace py = pybind11;
using namespace ordcollab;

namespace {

std::vector<double> to_vector(const LabelVector& y) { return {y.begin(), y.end()}; }

py::dict dataset_dict(const Dataset& data) {
  py::list features, labels, groups, tasks, coders;
  for (const auto& s : data.samples) {
    features.append(s.features);
    labels.append(to_vector(s.label));
    groups.append(s.group_id);
    tasks.append(s.task_id);
    coders.append(s.coder_id);
  }
  py::dict d;
  d["feature_kind"] = std::string(to_string(data.feature_kind));
  d["features"] = features;
  d["labels"] = labels;
  d["group_ids"] = groups;
  d["task_ids"] = tasks;
  d["coder_ids"] = coders;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ordcollab, m) {
  m.doc() = "Ordinal collaboration-quality classification toolkit";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);

  m.def("version", [] { return version_string(); });

  m.def(
      "parameter_count",
      [](std::size_t input_dim, std::size_t hidden_width, std::size_t hidden_layers) {
        MlpShape shape;
        shape.input_dim = input_dim;
        shape.hidden_width = hidden_width;
        shape.hidden_layers = hidden_layers;
        shape.dropout.assign(hidden_layers + 1, 0.0);
        return parameter_count(shape);
      },
      py::arg("input_dim"), py::arg("hidden_width") = 500, py::arg("hidden_layers") = 3);

  m.def(
      "ce_loss", [](std::vector<double> p, std::vector<double> y) { return ce_loss(p, y); },
      py::arg("p"), py::arg("y"));
  m.def(
      "oce_loss", [](std::vector<double> p, std::vector<double> y) { return oce_loss(p, y); },
      py::arg("p"), py::arg("y"));

  m.def(
      "sample_lambdas",
      [](double alpha, double tau, std::size_t count, std::uint64_t seed) {
        auto rng = make_stream(seed, {});
        std::vector<double> out(count);
        for (auto& v : out) v = sample_lambda(alpha, tau, rng);
        return out;
      },
      py::arg("alpha"), py::arg("tau"), py::arg("count"), py::arg("seed") = 0);

  m.def(
      "weighted_metrics",
      [](std::vector<std::size_t> predictions, std::vector<std::size_t> truths) {
        const auto w = weighted_metrics(predictions, truths);
        py::dict d;
        d["precision"] = w.precision;
        d["recall"] = w.recall;
        d["f1"] = w.f1;
        return d;
      },
      py::arg("predictions"), py::arg("truths"));

  m.def(
      "synth",
      [](const std::string& out_dir, const std::string& config_json) {
        const auto cfg = synth_config_from_json(nlohmann::json::parse(config_json));
        const auto corpus = generate_corpus(cfg);
        write_synth_corpus(out_dir, corpus);
        return corpus.tasks.size();
      },
      py::arg("out_dir"), py::arg("config_json") = "{}");

  m.def(
      "load_dataset",
      [](const std::string& config_json) {
        const auto cfg = experiment_config_from_json(nlohmann::json::parse(config_json));
        return dataset_dict(load_experiment_dataset(cfg));
      },
      py::arg("config_json"));

  m.def(
      "run_experiment",
      [](const std::string& config_json, std::size_t jobs) {
        const auto cfg = experiment_config_from_json(nlohmann::json::parse(config_json));
        cfg.validate();
        EvalReport report;
        {
          py::gil_scoped_release release;
          report = run_experiment(cfg, RunOptions{jobs});
        }
        return to_json(report).dump();
      },
      py::arg("config_json"), py::arg("jobs") = 1);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "ordcollab");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
