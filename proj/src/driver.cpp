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

#include "qjump/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <climits>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>

#include <Eigen/Core>

namespace qjump {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

#ifndef QJUMP_VERSION
#define QJUMP_VERSION "unknown"
#endif

constexpr std::size_t kDefaultGridPoints = 21;
constexpr std::size_t kBranchRateNodes = 2001;

struct PlannedStrategy {
    StrategySpec spec;
    json sampler;
};

const char* command_name(Command c) { return c == Command::Run ? "run" : "compare"; }

std::vector<PlannedStrategy> plan_strategies(const RunConfig& config, const DriverOptions& options) {
    std::vector<PlannedStrategy> out;
    if (options.command == Command::Compare && !options.strategies.empty()) {
        for (const auto& name : options.strategies) {
            parse_strategy_kind(name);
            StrategySpec spec{name, json::object(), json::object()};
            for (const auto& s : config.strategies)
                if (s.name == name) spec = s;
            for (const auto& p : out)
                require(p.spec.name != name, ErrorCode::Config, "strategy '" + name + "' requested twice");
            require(parse_strategy_kind(name) != StrategyKind::Fixed || spec.params.contains("alphas"),
                    ErrorCode::Config, "fixed strategy needs alphas in the config");
            out.push_back({spec, sampler_json(config.sampler, spec.sampler)});
        }
    } else {
        for (const auto& s : config.strategies) out.push_back({s, sampler_json(config.sampler, s.sampler)});
    }
    if (options.command == Command::Compare)
        require(out.size() >= 2, ErrorCode::Config, "compare needs at least two strategies");
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path.string());
    out << text;
}

json state_json(const ComplexMatrix& rho, double t) {
    return {{"format", "qjump.state"}, {"version", 1}, {"time", t}, {"dim", rho.rows()},
            {"matrix", matrix_to_json(rho)}};
}

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json versions() {
    return {{"qjump", QJUMP_VERSION},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"compiler", __VERSION__}};
}

}  // namespace

std::string resolve_output_dir(const RunConfig& config, const DriverOptions& options) {
    if (options.output_dir) return *options.output_dir;
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
    return config.output_dir;
}

RunOutcome execute(const RunConfig& config, const DriverOptions& options) {
    const auto wall0 = std::chrono::steady_clock::now();
    const std::string started = utc_now();

    // Validation: nothing touches the disk until the whole run is known to be well-formed.
    const BuiltModel model = build_model(config.model, config.model_params);
    const InitialState init = build_initial_state(model, config.initial_state);
    const std::vector<PlannedStrategy> planned = plan_strategies(config, options);
    for (const auto& p : planned) {
        if (parse_strategy_kind(p.spec.name) != StrategyKind::PerOrder) make_strategy(p.spec, model.system);
        if (p.sampler.value("time_distribution", std::string("uniform")) != "rate" &&
            p.sampler.value("time_distribution", std::string()) != "branch_rate")
            make_sampler(p.sampler, json::object(), nullptr);
    }

    RunOutcome out;
    out.output_dir = resolve_output_dir(config, options);
    auto log = [&](const std::string& msg) {
        if (options.log) *options.log << msg << std::endl;
    };

    PropagationOptions popts;
    popts.store_every = config.reference_store_every > 0 ? config.reference_store_every : INT_MAX;
    log("reference propagation: " + config.model + ", tau = " + std::to_string(config.tau));
    out.reference = propagate(model.system, init.rho, config.tau, config.reference_dt, popts);
    const ComplexMatrix& exact = out.reference.final_state();

    ComplexMatrix analytic;
    if (init.oracle) {
        analytic = zero_t_oracle(*init.oracle, config.tau, model.system.dim());
        out.analytic_fidelity = fidelity(analytic / analytic.trace().real(), exact / exact.trace().real());
    }

    json timings = json::object();
    std::uint64_t base_seed = 0;
    for (const auto& p : planned) {
        const auto t0 = std::chrono::steady_clock::now();
        SamplerConfig sampler = make_sampler(p.sampler, json::object(), &out.reference);
        if (options.workers) sampler.workers = *options.workers;
        if (&p == &planned.front()) base_seed = sampler.seed;
        std::shared_ptr<const PerOrderGrid> grid;
        if (parse_strategy_kind(p.spec.name) == StrategyKind::PerOrder) {
            const std::size_t points = p.spec.params.value("grid_points", kDefaultGridPoints);
            log("per-order grid: " + std::to_string(points) + " points");
            grid = std::make_shared<const PerOrderGrid>(
                build_per_order_grid(model.system, init.rho, config.tau, points, sampler));
        }
        const ResummationStrategy strategy = make_strategy(p.spec, model.system, grid);
        if (p.sampler.value("time_distribution", std::string()) == "branch_rate") {
            const BranchPropagator prop(model.system, strategy, sampler.dt);
            const auto nodes = static_cast<std::size_t>(
                std::clamp(std::ceil(config.tau / sampler.dt) + 1.0, 2.0, double(kBranchRateNodes)));
            sampler = make_sampler(p.sampler, json::object(), &out.reference,
                                   [&] { return branch_rate_density(prop, init.rho, config.tau, nodes); });
            if (options.workers) sampler.workers = *options.workers;
        }
        log("expansion: " + p.spec.name + ", K = " + std::to_string(sampler.max_order) +
            ", N = " + std::to_string(sampler.n_samples));
        ExpansionEstimate est = estimate_expansion(model.system, strategy, init.rho, config.tau, sampler);
        RunMetadata meta{sampler.seed, sampler.n_samples, sampler.dt, config.tau, sampler.time_distribution.name()};
        out.reports.push_back(build_report(exact, est, config.model, meta));
        out.estimates.push_back(std::move(est));
        timings[p.spec.name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    const fs::path dir(out.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    require(!ec, ErrorCode::Io, "cannot create " + out.output_dir + ": " + ec.message());
    auto artifact = [&](const std::string& name) {
        out.artifacts.push_back(name);
        return (dir / name).string();
    };

    write_text(artifact("reference_state.json"), state_json(exact, config.tau).dump() + "\n");
    write_propagation_csv(out.reference, artifact("reference.csv"));
    if (init.oracle) write_text(artifact("analytic_state.json"), state_json(analytic, config.tau).dump() + "\n");
    for (std::size_t i = 0; i < planned.size(); ++i) {
        const std::string& name = planned[i].spec.name;
        write_expansion_csv(out.estimates[i], artifact("expansion_" + name + ".csv"));
        if (config.write_dumps) write_expansion_dump(out.estimates[i], artifact("expansion_" + name + ".qjxd"));
        write_report_csv(out.reports[i], artifact("report_" + name + ".csv"));
    }
    if (options.command == Command::Compare) write_combined_csv(out.reports, artifact("combined.csv"));

    json manifest;
    manifest["format"] = "qjump.manifest";
    manifest["version"] = 1;
    manifest["command"] = command_name(options.command);
    json names = json::array();
    for (const auto& p : planned) names.push_back(p.spec.name);
    manifest["strategies"] = names;
    manifest["config"] = config.to_json();
    manifest["seed"] = base_seed;
    manifest["workers"] = options.workers ? json(*options.workers) : json(nullptr);
    manifest["versions"] = versions();
    manifest["artifacts"] = out.artifacts;
    json summary;
    if (out.analytic_fidelity) summary["reference_vs_analytic_fidelity"] = *out.analytic_fidelity;
    summary["reference_min_eigenvalue"] = out.reference.min_eigenvalue;
    summary["reference_max_trace_drift"] = out.reference.max_trace_drift;
    for (const auto& r : out.reports)
        summary["strategies"][r.strategy] = {{"fidelity", r.fidelity}, {"cum_weight", r.cumulative_weights}};
    manifest["summary"] = summary;
    manifest["wall_clock"] = {
        {"started_utc", started},
        {"elapsed_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count()},
        {"strategy_seconds", timings}};
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    out.artifacts.push_back("manifest.json");
    return out;
}

RunOutcome replay(const std::string& manifest_path, DriverOptions options) {
    const json m = read_json_file(manifest_path);
    require(m.is_object() && m.value("format", std::string()) == "qjump.manifest", ErrorCode::Config,
            manifest_path + " is not a qjump manifest");
    require(m.value("version", 0) == 1, ErrorCode::Config, "unsupported manifest version");
    const RunConfig config = parse_config(m.at("config"));
    const std::string cmd = m.value("command", std::string("run"));
    require(cmd == "run" || cmd == "compare", ErrorCode::Config, "unknown command '" + cmd + "' in manifest");
    options.command = cmd == "run" ? Command::Run : Command::Compare;
    options.strategies = m.at("strategies").get<std::vector<std::string>>();
    return execute(config, options);
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::Config:
        case ErrorCode::InvalidArgument:
        case ErrorCode::IncommensurateKick:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::IndexOutOfRange:
        case ErrorCode::GridRangeError:
        case ErrorCode::NotHermitian:
            return 2;
        case ErrorCode::StepTooLarge:
        case ErrorCode::TruncationTooSmall:
        case ErrorCode::GridTooCoarse:
        case ErrorCode::NonFinite:
        case ErrorCode::NotPositive:
        case ErrorCode::VanishingWeight:
        case ErrorCode::DegenerateRates:
            return 3;
        case ErrorCode::Io:
            return 1;
    }
    return 1;
}

}  // namespace qjump
