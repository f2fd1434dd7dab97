#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "rho/classical.hpp"
#include "rho/experiment.hpp"
#include "rho/stats.hpp"

namespace py = pybind11;
namespace ex = rho::experiment;
namespace cl = rho::classical;

namespace {

std::vector<rho::TrialRecord> records_from_labels(const std::vector<std::size_t>& labels) {
  std::vector<rho::TrialRecord> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = {i, rho::Discrete{labels[i]}, std::nullopt};
  return out;
}

rho::OutcomeSpace label_space(std::size_t J) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < J; ++j) names.push_back(std::to_string(j));
  return rho::OutcomeSpace::discrete(std::move(names));
}

rho::StabilizationConfig stabilization_config(std::size_t blocks, double burn_in, double z, double eps_abs,
                                              std::uint64_t min_n) {
  rho::StabilizationConfig c;
  c.blocks = blocks;
  c.burn_in = burn_in;
  c.z = z;
  c.eps_abs = eps_abs;
  c.min_n = min_n;
  return c;
}

py::dict verdict_dict(const rho::StabilizationVerdict& v) {
  py::dict d;
  if (const auto* s = std::get_if<rho::Stabilizing>(&v)) {
    d["kind"] = "stabilizing";
    d["n_used"] = s->n_used;
    d["estimates"] = s->estimates;
    d["half_widths"] = s->half_widths;
  } else if (const auto* s = std::get_if<rho::NonStabilizing>(&v)) {
    d["kind"] = "non-stabilizing";
    d["entry_index"] = s->entry;
    d["block"] = s->block;
    d["block_frequency"] = s->block_frequency;
    d["pooled_frequency"] = s->pooled_frequency;
    d["deviation"] = s->deviation;
    d["allowance"] = s->allowance;
  } else {
    const auto& inc = std::get<rho::Inconclusive>(v);
    d["kind"] = "inconclusive";
    d["n"] = inc.n;
    d["min_n"] = inc.min_n;
  }
  return d;
}

py::tuple fraction(const cl::Rational& r) { return py::make_tuple(r.numerator(), r.denominator()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Frequency-stabilization experiments on simulated probabilistic systems";

  auto base = py::register_exception<rho::Error>(m, "RhoError", PyExc_RuntimeError);
  py::register_exception<ex::IoError>(m, "IoError", base.ptr());
  py::register_exception<rho::InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ex::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.attr("REPORT_SCHEMA") = ex::kReportSchema;

  m.def(
      "run_experiment_json",
      [](const std::string& config_json) {
        const auto config = ex::config_from_json(ex::json::parse(config_json));
        ex::ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = ex::run_experiment(config);
        }
        py::object trace = py::none();
        if (result.trace) trace = py::str(ex::render_trace(*result.trace));
        return py::make_tuple(result.report.dump(), trace);
      },
      py::arg("config_json"));

  m.def("catalog_json", [] { return ex::catalog_json().dump(); });

  m.def(
      "render_report",
      [](const std::string& report_json, const std::string& format) {
        return ex::render_report(ex::json::parse(report_json), format);
      },
      py::arg("report_json"), py::arg("format") = "text");

  m.def(
      "run_trials",
      [](const std::string& scenario, std::size_t n, std::uint64_t seed,
         const std::map<std::string, std::string>& params, unsigned workers) {
        const auto system = ex::build_scenario(scenario, params, n);
        std::vector<rho::TrialRecord> records;
        {
          py::gil_scoped_release release;
          records = rho::run_trials(system, n, rho::SeedSpec{seed}, workers);
        }
        py::list out;
        for (const auto& r : records) {
          if (const auto* d = std::get_if<rho::Discrete>(&r.outcome)) {
            out.append(d->label);
          } else {
            out.append(std::get<rho::Continuous>(r.outcome).value);
          }
        }
        return out;
      },
      py::arg("scenario"), py::arg("n"), py::arg("seed") = 42,
      py::arg("params") = std::map<std::string, std::string>{}, py::arg("workers") = 1);

  m.def(
      "test_stabilization",
      [](const std::vector<std::size_t>& labels, std::size_t J, std::size_t blocks, double burn_in, double z,
         double eps_abs, std::uint64_t min_n) {
        const auto records = records_from_labels(labels);
        return verdict_dict(rho::test_stabilization(records, label_space(J),
                                                    stabilization_config(blocks, burn_in, z, eps_abs, min_n)));
      },
      py::arg("labels"), py::arg("J"), py::arg("blocks") = 10, py::arg("burn_in") = 0.1, py::arg("z") = 4.0,
      py::arg("eps_abs") = 0.0, py::arg("min_n") = 1000);

  m.def(
      "classify",
      [](const std::vector<std::size_t>& labels, std::size_t J, std::size_t order, double train_fraction,
         double z) {
        rho::StabilizationConfig sc;
        sc.z = z;
        const auto records = records_from_labels(labels);
        return std::string(rho::to_string(
            rho::classify(records, label_space(J), sc, rho::PredictorConfig{order, train_fraction}).cls));
      },
      py::arg("labels"), py::arg("J"), py::arg("order") = 2, py::arg("train_fraction") = 0.5, py::arg("z") = 4.0);

  m.def(
      "predictor_accuracy",
      [](const std::vector<std::size_t>& labels, std::size_t J, std::size_t order, double train_fraction) {
        const auto records = records_from_labels(labels);
        return rho::predictor_accuracy(records, label_space(J), rho::PredictorConfig{order, train_fraction});
      },
      py::arg("labels"), py::arg("J"), py::arg("order") = 2, py::arg("train_fraction") = 0.5);

  m.def("binomial_half_width", &rho::binomial_half_width, py::arg("p"), py::arg("n"), py::arg("z") = 4.0);

  m.def(
      "laplace_probability",
      [](std::size_t J, std::size_t favorable) {
        return fraction(cl::laplace_probability(cl::EquiprobableSpace(J), favorable));
      },
      py::arg("J"), py::arg("favorable"));

  m.def(
      "composed_event_probability",
      [](const std::string& descriptor_json) {
        const auto parsed = ex::parse_event(ex::json::parse(descriptor_json), std::nullopt);
        return fraction(cl::composed_event_probability(cl::EquiprobableSpace(parsed.J), parsed.event));
      },
      py::arg("descriptor_json"));

  m.def(
      "check_frequentist_agreement",
      [](const std::string& descriptor_json, std::size_t n, std::uint64_t seed, unsigned workers, double z) {
        const auto parsed = ex::parse_event(ex::json::parse(descriptor_json), std::nullopt);
        cl::Agreement a;
        {
          py::gil_scoped_release release;
          a = cl::check_frequentist_agreement(cl::EquiprobableSpace(parsed.J), parsed.event, n, rho::SeedSpec{seed},
                                              workers, z);
        }
        py::dict d;
        d["exact"] = fraction(a.exact);
        d["estimate"] = a.estimate;
        d["half_width"] = a.half_width;
        d["agrees"] = a.agrees;
        return d;
      },
      py::arg("descriptor_json"), py::arg("n"), py::arg("seed") = 42, py::arg("workers") = 1, py::arg("z") = 4.0);
}
