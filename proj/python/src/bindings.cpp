// Copyright 2026 The qjump Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/gil_safe_call_once.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qjump/analysis.hpp"
#include "qjump/config.hpp"
#include "qjump/driver.hpp"
#include "qjump/models.hpp"
#include "qjump/propagator.hpp"
#include "qjump/strategy.hpp"

namespace py = pybind11;
using namespace qjump;
using nlohmann::json;

namespace {

json report_json(const ConvergenceReport& r) {
    return {{"strategy", r.strategy},
            {"model", r.model},
            {"metadata", r.metadata_json()},
            {"k", r.k_values},
            {"fidelity", r.fidelity},
            {"fidelity_stderr", r.fidelity_stderr},
            {"cum_weight", r.cumulative_weights},
            {"weight_stderr", r.weight_stderr}};
}

std::string run_config(const RunConfig& config, const std::string& command,
                       const std::vector<std::string>& strategies, std::optional<std::string> output_dir,
                       std::optional<std::size_t> workers) {
    DriverOptions opts;
    if (command == "compare")
        opts.command = Command::Compare;
    else
        require(command == "run", ErrorCode::Config, "command must be run or compare, got " + command);
    opts.strategies = strategies;
    opts.output_dir = std::move(output_dir);
    opts.workers = workers;
    RunOutcome out;
    {
        py::gil_scoped_release release;
        out = execute(config, opts);
    }
    json reports = json::array();
    for (const auto& r : out.reports) reports.push_back(report_json(r));
    json doc = {{"output_dir", out.output_dir}, {"artifacts", out.artifacts}, {"reports", reports}};
    if (out.analytic_fidelity) doc["analytic_fidelity"] = *out.analytic_fidelity;
    return doc.dump();
}

ResummationStrategy strategy_by_name(const std::string& name, const OpenSystem& sys, const std::string& params) {
    StrategySpec spec;
    spec.name = name;
    if (!params.empty()) spec.params = json::parse(params);
    return make_strategy(spec, sys);
}

}  // namespace

PYBIND11_MODULE(_qjump, m) {
    m.doc() = "Jump expansion of Markovian master equations with adaptive resummation";
    m.attr("__version__") = QJUMP_VERSION;

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> exc_storage;
    exc_storage.call_once_and_store_result([&]() { return py::exception<Error>(m, "QJumpError"); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            // args = (code name, message)
            py::set_error(exc_storage.get_stored(), py::make_tuple(error_code_name(e.code()), e.what()));
        }
    });

    py::class_<OpenSystem>(m, "OpenSystem")
        .def(py::init<ComplexMatrix, std::vector<ComplexMatrix>>(), py::arg("hamiltonian"), py::arg("jumps"))
        .def_property_readonly("dim", [](const OpenSystem& s) { return s.dim(); })
        .def_property_readonly("num_jumps", &OpenSystem::num_jumps)
        .def_property_readonly("labels", &OpenSystem::labels)
        .def_property_readonly("hamiltonian", [](const OpenSystem& s) { return ComplexMatrix(s.hamiltonian()); })
        .def("jump", [](const OpenSystem& s, std::size_t j) { return ComplexMatrix(s.jump(j)); }, py::arg("j"))
        .def("generator", [](const OpenSystem& s, const ComplexMatrix& rho) { return apply_generator(s, rho); },
             py::arg("rho"), "Right-hand side of the master equation.")
        .def("minimal_rate", [](const OpenSystem& s, std::size_t j, const ComplexMatrix& rho) {
            return minimal_rate(s, j, rho);
        }, py::arg("j"), py::arg("rho"))
        .def("optimal_shifts", [](const OpenSystem& s, const ComplexMatrix& rho) {
            return optimal_shifts(s, rho).alphas;
        }, py::arg("rho"));

    py::class_<ResummationStrategy>(m, "Strategy")
        .def_static("no_shift", &ResummationStrategy::no_shift)
        .def_static("optimal", &ResummationStrategy::optimal)
        .def_static("piecewise_constant", &ResummationStrategy::piecewise_constant)
        .def_static("index_conditioned", &ResummationStrategy::index_conditioned)
        .def_static("fixed", [](std::vector<Complex> alphas) { return ResummationStrategy::fixed({std::move(alphas)}); },
                    py::arg("alphas"))
        .def_property_readonly("name", &ResummationStrategy::name)
        .def("__repr__", [](const ResummationStrategy& s) { return "<Strategy " + s.name() + ">"; });

    m.def("strategy", &strategy_by_name, py::arg("name"), py::arg("system"), py::arg("params_json") = "",
          "Strategy from its config name; params_json carries e.g. fixed alphas.");

    py::class_<ExpansionEstimate>(m, "Expansion")
        .def_readonly("time", &ExpansionEstimate::time)
        .def_readonly("strategy", &ExpansionEstimate::strategy)
        .def_readonly("weights", &ExpansionEstimate::weights)
        .def_readonly("weight_stderr", &ExpansionEstimate::weight_stderr)
        .def_readonly("sample_counts", &ExpansionEstimate::sample_counts)
        .def_readonly("states", &ExpansionEstimate::per_order_states)
        .def_property_readonly("max_order", &ExpansionEstimate::max_order)
        .def("partial_sum", &ExpansionEstimate::partial_sum, py::arg("k"))
        .def("cumulative_weights", [](const ExpansionEstimate& e) { return cumulative_weights(e); })
        .def("cumulative_weight_stderr", [](const ExpansionEstimate& e) { return cumulative_weight_stderr(e); });

    m.def(
        "estimate_expansion",
        [](const OpenSystem& sys, const ResummationStrategy& strategy, const ComplexMatrix& rho0, double t,
           std::size_t n_samples, std::size_t max_order, std::uint64_t seed, double dt, std::size_t workers,
           const std::string& sampler_json) {
            json overrides = sampler_json.empty() ? json::object() : json::parse(sampler_json);
            json base = {{"n_samples", n_samples}, {"max_order", max_order}, {"seed", seed}, {"dt", dt},
                         {"workers", workers}};
            SamplerConfig c = make_sampler(base, overrides, nullptr);
            py::gil_scoped_release release;
            return estimate_expansion(sys, strategy, rho0, t, c);
        },
        py::arg("system"), py::arg("strategy"), py::arg("rho0"), py::arg("t"), py::arg("n_samples") = 1000,
        py::arg("max_order") = 5, py::arg("seed") = 1, py::arg("dt") = 0.01, py::arg("workers") = 1,
        py::arg("sampler_json") = "");

    m.def(
        "propagate",
        [](const OpenSystem& sys, const ComplexMatrix& rho0, double t_final, double dt, int store_every) {
            PropagationOptions opts;
            if (store_every > 0) opts.store_every = store_every;
            else opts.store_every = std::max(1, static_cast<int>(std::ceil(t_final / dt)));
            PropagationResult r;
            {
                py::gil_scoped_release release;
                r = propagate(sys, rho0, t_final, dt, opts);
            }
            py::dict d;
            d["times"] = r.times;
            d["traces"] = r.traces;
            d["purities"] = r.purities;
            d["rate_profile"] = r.rate_profile;
            d["state_times"] = r.state_times;
            d["states"] = r.states;
            d["final_state"] = r.final_state();
            d["min_eigenvalue"] = r.min_eigenvalue;
            d["max_trace_drift"] = r.max_trace_drift;
            return d;
        },
        py::arg("system"), py::arg("rho0"), py::arg("t_final"), py::arg("dt"), py::arg("store_every") = 0);

    m.def("fidelity", &fidelity, py::arg("sigma"), py::arg("rho"));
    m.def("truncated_fidelity", &truncated_fidelity, py::arg("rho_exact"), py::arg("expansion"), py::arg("k"));

    m.def("catalog_json", [](bool aux) { return catalog_json(aux).dump(); }, py::arg("include_auxiliary") = false);
    m.def(
        "build_model",
        [](const std::string& name, const std::string& params) {
            BuiltModel b = build_model(name, params.empty() ? json::object() : json::parse(params));
            return py::make_tuple(b.system, b.params.dump());
        },
        py::arg("name"), py::arg("params_json") = "", "Returns (system, resolved params as JSON).");
    m.def(
        "initial_state",
        [](const std::string& name, const std::string& params, const std::string& spec) {
            const BuiltModel b = build_model(name, params.empty() ? json::object() : json::parse(params));
            return build_initial_state(b, json::parse(spec)).rho;
        },
        py::arg("model"), py::arg("params_json"), py::arg("spec_json"));

    m.def(
        "run_config_file",
        [](const std::string& path, const std::string& command, const std::vector<std::string>& strategies,
           std::optional<std::string> output_dir, std::optional<std::size_t> workers) {
            return run_config(load_config(path), command, strategies, std::move(output_dir), workers);
        },
        py::arg("path"), py::arg("command") = "run", py::arg("strategies") = std::vector<std::string>{},
        py::arg("output_dir") = py::none(), py::arg("workers") = py::none());
    m.def(
        "run_config_json",
        [](const std::string& text, const std::string& command, const std::vector<std::string>& strategies,
           std::optional<std::string> output_dir, std::optional<std::size_t> workers) {
            return run_config(parse_config(json::parse(text)), command, strategies, std::move(output_dir), workers);
        },
        py::arg("text"), py::arg("command") = "run", py::arg("strategies") = std::vector<std::string>{},
        py::arg("output_dir") = py::none(), py::arg("workers") = py::none());
}
