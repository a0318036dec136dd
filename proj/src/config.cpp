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

#include "qjump/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "qjump/errors.hpp"

namespace qjump {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    require(obj.is_object(), ErrorCode::Config, where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        require(allowed.count(it.key()) > 0, ErrorCode::Config, "unknown key '" + it.key() + "' in " + where);
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
    require(obj.contains(key), ErrorCode::Config, where + " needs '" + key + "'");
    require(obj[key].is_number(), ErrorCode::Config, where + "." + key + " must be a number");
    return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
    return obj.contains(key) ? get_number(obj, key, where) : fallback;
}

std::size_t count_or(const json& obj, const std::string& key, std::size_t fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    require(obj[key].is_number_unsigned() || (obj[key].is_number_integer() && obj[key].get<long long>() >= 0),
            ErrorCode::Config, where + "." + key + " must be a non-negative integer");
    return obj[key].get<std::size_t>();
}

const std::set<std::string> kSamplerKeys = {"n_samples",       "max_order",     "seed",
                                            "time_distribution", "dt",          "index_enum_cap",
                                            "index_sampling",  "representation", "density_dim_limit",
                                            "workers",         "error_batches", "uniform_fraction"};

StrategySpec parse_strategy(const json& j) {
    StrategySpec s;
    if (j.is_string()) {
        s.name = j.get<std::string>();
    } else {
        check_keys(j, {"name", "alphas", "grid_points", "sampler"}, "strategy");
        require(j.contains("name") && j["name"].is_string(), ErrorCode::Config, "strategy needs a name");
        s.name = j["name"].get<std::string>();
        for (const char* k : {"alphas", "grid_points"})
            if (j.contains(k)) s.params[k] = j[k];
        if (j.contains("sampler")) {
            check_keys(j["sampler"], kSamplerKeys, "strategy sampler");
            s.sampler = j["sampler"];
        }
    }
    const StrategyKind kind = parse_strategy_kind(s.name);
    if (kind == StrategyKind::Fixed)
        require(s.params.contains("alphas") && s.params["alphas"].is_array(), ErrorCode::Config,
                "fixed strategy needs an 'alphas' list");
    if (kind == StrategyKind::PerOrder && s.params.contains("grid_points"))
        require(s.params["grid_points"].is_number_integer() && s.params["grid_points"].get<long long>() >= 2,
                ErrorCode::Config, "grid_points must be an integer >= 2");
    return s;
}

json strategy_json(const StrategySpec& s) {
    json j = s.params;
    j["name"] = s.name;
    if (!s.sampler.empty()) j["sampler"] = s.sampler;
    return j;
}

bool is_fock_model(const std::string& name) { return name == "damped_ho" || name == "measure_fb"; }

ComplexMatrix checked_pure(const BuiltModel& model, ComplexVector psi, const std::string& what) {
    const double n = psi.norm();
    require(n > 0.0 && std::isfinite(n), ErrorCode::Config, what + " has zero norm");
    psi /= n;
    ComplexMatrix rho = ket_to_density(psi);
    if (is_fock_model(model.name)) check_fock_truncation(rho, what);
    return rho;
}

}  // namespace

Complex complex_from_json(const json& j, const std::string& what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(), ErrorCode::Config,
            what + " must be a number or an [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::Config, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::Config, path + ": " + e.what());
    }
}

RunConfig parse_config(const json& doc) {
    check_keys(doc, {"name", "model", "initial_state", "tau", "strategy", "strategies", "sampler", "reference",
                     "output"},
               "config");
    RunConfig c;
    if (doc.contains("name")) {
        require(doc["name"].is_string(), ErrorCode::Config, "name must be a string");
        c.name = doc["name"].get<std::string>();
    }

    require(doc.contains("model"), ErrorCode::Config, "config needs a model");
    const json& m = doc["model"];
    if (m.is_string()) {
        c.model = m.get<std::string>();
    } else {
        check_keys(m, {"name", "params"}, "model");
        require(m.contains("name") && m["name"].is_string(), ErrorCode::Config, "model needs a name");
        c.model = m["name"].get<std::string>();
        if (m.contains("params")) c.model_params = m["params"];
    }
    find_model(c.model);

    require(doc.contains("initial_state"), ErrorCode::Config, "config needs an initial_state");
    c.initial_state = doc["initial_state"];
    require(c.initial_state.is_object() && c.initial_state.contains("kind"), ErrorCode::Config,
            "initial_state needs a kind");

    c.tau = get_number(doc, "tau", "config");
    require(std::isfinite(c.tau) && c.tau > 0.0, ErrorCode::Config, "tau must be positive");

    require(!(doc.contains("strategy") && doc.contains("strategies")), ErrorCode::Config,
            "give either strategy or strategies");
    if (doc.contains("strategy")) c.strategies.push_back(parse_strategy(doc["strategy"]));
    if (doc.contains("strategies")) {
        require(doc["strategies"].is_array(), ErrorCode::Config, "strategies must be a list");
        for (const auto& s : doc["strategies"]) c.strategies.push_back(parse_strategy(s));
    }
    require(!c.strategies.empty(), ErrorCode::Config, "config needs at least one strategy");
    std::set<std::string> names;
    for (const auto& s : c.strategies)
        require(names.insert(s.name).second, ErrorCode::Config, "strategy '" + s.name + "' listed twice");

    if (doc.contains("sampler")) {
        check_keys(doc["sampler"], kSamplerKeys, "sampler");
        c.sampler = doc["sampler"];
    }
    if (doc.contains("reference")) {
        const json& r = doc["reference"];
        check_keys(r, {"dt", "store_every"}, "reference");
        c.reference_dt = number_or(r, "dt", c.reference_dt, "reference");
        c.reference_store_every = static_cast<int>(count_or(r, "store_every", 0, "reference"));
    }
    require(c.reference_dt > 0.0 && std::isfinite(c.reference_dt), ErrorCode::Config,
            "reference.dt must be positive");
    if (doc.contains("output")) {
        const json& o = doc["output"];
        check_keys(o, {"dir", "dumps"}, "output");
        if (o.contains("dir")) {
            require(o["dir"].is_string(), ErrorCode::Config, "output.dir must be a string");
            c.output_dir = o["dir"].get<std::string>();
        }
        if (o.contains("dumps")) {
            require(o["dumps"].is_boolean(), ErrorCode::Config, "output.dumps must be a boolean");
            c.write_dumps = o["dumps"].get<bool>();
        }
    }
    // Catch malformed sampler blocks before any work is done.
    for (const auto& s : c.strategies) {
        const json merged = sampler_json(c.sampler, s.sampler);
        if (merged.value("time_distribution", std::string("uniform")) != "rate" &&
            merged.value("time_distribution", std::string()) != "branch_rate")
            make_sampler(c.sampler, s.sampler, nullptr).validate();
    }
    return c;
}

RunConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

json RunConfig::to_json() const {
    json j;
    j["name"] = name;
    j["model"] = {{"name", model}, {"params", model_params}};
    j["initial_state"] = initial_state;
    j["tau"] = tau;
    j["strategies"] = json::array();
    for (const auto& s : strategies) j["strategies"].push_back(strategy_json(s));
    j["sampler"] = sampler;
    j["reference"] = {{"dt", reference_dt}, {"store_every", reference_store_every}};
    j["output"] = {{"dir", output_dir}, {"dumps", write_dumps}};
    return j;
}

json sampler_json(const json& base, const json& overrides) {
    json merged = base.is_object() ? base : json::object();
    if (overrides.is_object())
        for (auto it = overrides.begin(); it != overrides.end(); ++it) merged[it.key()] = it.value();
    return merged;
}

SamplerConfig make_sampler(const json& base, const json& overrides, const PropagationResult* reference,
                           const std::function<RateDensity()>& branch_rate) {
    const json j = sampler_json(base, overrides);
    check_keys(j, kSamplerKeys, "sampler");
    SamplerConfig s;
    s.n_samples = count_or(j, "n_samples", s.n_samples, "sampler");
    s.max_order = count_or(j, "max_order", s.max_order, "sampler");
    s.seed = static_cast<std::uint64_t>(count_or(j, "seed", s.seed, "sampler"));
    s.dt = number_or(j, "dt", s.dt, "sampler");
    s.index_enum_cap = count_or(j, "index_enum_cap", s.index_enum_cap, "sampler");
    s.density_dim_limit = static_cast<Eigen::Index>(count_or(j, "density_dim_limit", 64, "sampler"));
    s.workers = count_or(j, "workers", s.workers, "sampler");
    s.error_batches = count_or(j, "error_batches", s.error_batches, "sampler");
    const std::string td = j.value("time_distribution", std::string("uniform"));
    if (td == "uniform") {
        s.time_distribution = TimeDistribution::uniform();
    } else if (td == "rate") {
        require(reference != nullptr, ErrorCode::Config, "rate time distribution needs a reference run");
        s.time_distribution = TimeDistribution::rate_weighted(rate_density(*reference));
    } else if (td == "sequential") {
        s.time_distribution = TimeDistribution::sequential(j.value("uniform_fraction", 0.2));
    } else if (td == "branch_rate") {
        if (branch_rate) s.time_distribution = TimeDistribution::rate_weighted(branch_rate(), "branch_rate");
    } else {
        fail(ErrorCode::Config, "unknown time_distribution '" + td + "'");
    }
    const std::string is = j.value("index_sampling", std::string("partial_rate"));
    if (is == "partial_rate")
        s.index_sampling = IndexSampling::PartialRate;
    else if (is == "uniform")
        s.index_sampling = IndexSampling::Uniform;
    else
        fail(ErrorCode::Config, "unknown index_sampling '" + is + "'");
    const std::string rep = j.value("representation", std::string("auto"));
    if (rep == "auto")
        s.representation = Representation::Auto;
    else if (rep == "ket")
        s.representation = Representation::Ket;
    else if (rep == "density")
        s.representation = Representation::Density;
    else
        fail(ErrorCode::Config, "unknown representation '" + rep + "'");
    s.validate();
    return s;
}

InitialState build_initial_state(const BuiltModel& model, const json& spec) {
    require(spec.is_object() && spec.contains("kind") && spec["kind"].is_string(), ErrorCode::Config,
            "initial_state needs a kind");
    const std::string kind = spec["kind"].get<std::string>();
    const Eigen::Index dim = model.system.dim();
    InitialState out;
    if (kind == "fock") {
        check_keys(spec, {"kind", "levels", "amplitudes"}, "initial_state");
        require(spec.contains("levels") && spec["levels"].is_array() && !spec["levels"].empty(),
                ErrorCode::Config, "fock initial state needs a non-empty levels list");
        const json& levels = spec["levels"];
        std::vector<Complex> amps(levels.size(), Complex(1.0));
        if (spec.contains("amplitudes")) {
            require(spec["amplitudes"].is_array() && spec["amplitudes"].size() == levels.size(), ErrorCode::Config,
                    "amplitudes must match levels");
            for (std::size_t i = 0; i < levels.size(); ++i)
                amps[i] = complex_from_json(spec["amplitudes"][i], "amplitude");
        }
        ComplexVector psi = ComplexVector::Zero(dim);
        for (std::size_t i = 0; i < levels.size(); ++i) {
            require(levels[i].is_number_integer(), ErrorCode::Config, "Fock levels must be integers");
            psi += amps[i] * fock_ket(dim, levels[i].get<Eigen::Index>());
        }
        out.rho = checked_pure(model, psi, "fock initial state");
    } else if (kind == "coherent") {
        check_keys(spec, {"kind", "amplitude"}, "initial_state");
        require(spec.contains("amplitude"), ErrorCode::Config, "coherent initial state needs an amplitude");
        out.rho = checked_pure(model, coherent_ket(dim, complex_from_json(spec["amplitude"], "amplitude")),
                               "coherent initial state");
    } else if (kind == "coherent_superposition") {
        check_keys(spec, {"kind", "beta1", "beta2"}, "initial_state");
        require(model.name == "damped_ho", ErrorCode::Config, "coherent_superposition needs the damped_ho model");
        require(spec.contains("beta1") && spec.contains("beta2"), ErrorCode::Config,
                "coherent_superposition needs beta1 and beta2");
        const auto o = CoherentSuperpositionOracle::balanced(
            complex_from_json(spec["beta1"], "beta1"), complex_from_json(spec["beta2"], "beta2"),
            model.params["gamma"].get<double>(), model.params["omega"].get<double>());
        out.rho = checked_pure(model, o.initial_ket(dim), "coherent superposition");
        if (model.params["n_th"].get<double>() == 0.0) out.oracle = o;
    } else if (kind == "gaussian") {
        check_keys(spec, {"kind", "x0", "sigma_x", "k0"}, "initial_state");
        require(model.grid.has_value(), ErrorCode::Config, "gaussian initial state needs a spatial model");
        const double x0 = number_or(spec, "x0", 0.0, "initial_state");
        const double sx = get_number(spec, "sigma_x", "initial_state");
        const double k0 = number_or(spec, "k0", 0.0, "initial_state");
        const ComplexVector psi = model.name == "colldec" ? gaussian_packet_momentum(*model.grid, x0, sx, k0)
                                                          : gaussian_packet(*model.grid, x0, sx, k0);
        out.rho = ket_to_density(psi);
    } else if (kind == "thermal") {
        check_keys(spec, {"kind", "n_th"}, "initial_state");
        require(is_fock_model(model.name), ErrorCode::Config, "thermal initial state needs a Fock-space model");
        out.rho = thermal_state(dim, get_number(spec, "n_th", "initial_state"));
        check_fock_truncation(out.rho, "thermal initial state");
    } else {
        fail(ErrorCode::Config, "unknown initial_state kind '" + kind + "'");
    }
    return out;
}

ResummationStrategy make_strategy(const StrategySpec& spec, const OpenSystem& sys,
                                  std::shared_ptr<const PerOrderGrid> grid) {
    switch (parse_strategy_kind(spec.name)) {
        case StrategyKind::NoShift:
            return ResummationStrategy::no_shift();
        case StrategyKind::Fixed: {
            const json& a = spec.params.at("alphas");
            require(a.size() == sys.num_jumps(), ErrorCode::Config,
                    "fixed strategy needs one alpha per jump operator (" + std::to_string(sys.num_jumps()) + ")");
            ShiftVector alpha = ShiftVector::zero(sys.num_jumps());
            for (std::size_t j = 0; j < a.size(); ++j) alpha[j] = complex_from_json(a[j], "alpha");
            return ResummationStrategy::fixed(std::move(alpha));
        }
        case StrategyKind::Optimal:
            return ResummationStrategy::optimal();
        case StrategyKind::PiecewiseConstant:
            return ResummationStrategy::piecewise_constant();
        case StrategyKind::IndexConditioned:
            return ResummationStrategy::index_conditioned();
        case StrategyKind::PerOrder:
            require(static_cast<bool>(grid), ErrorCode::InvalidArgument, "per_order strategy needs its grid");
            return ResummationStrategy::per_order(std::move(grid));
    }
    fail(ErrorCode::Config, "unknown strategy");
}

}  // namespace qjump
