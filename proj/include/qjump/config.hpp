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

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qjump/models.hpp"
#include "qjump/montecarlo.hpp"
#include "qjump/propagator.hpp"

namespace qjump {

// One strategy entry of a run. `params` carries strategy-specific settings
// (alphas for fixed, grid_points for per_order); `sampler` overrides the base
// sampler settings for this strategy only.
struct StrategySpec {
    std::string name;
    nlohmann::json params = nlohmann::json::object();
    nlohmann::json sampler = nlohmann::json::object();
};

struct RunConfig {
    std::string name;
    std::string model;
    nlohmann::json model_params = nlohmann::json::object();
    nlohmann::json initial_state;
    double tau = 0.0;
    std::vector<StrategySpec> strategies;
    nlohmann::json sampler = nlohmann::json::object();
    double reference_dt = 1e-3;
    int reference_store_every = 0;  // 0 keeps only the final state
    std::string output_dir = "qjump_out";
    bool write_dumps = true;

    // Normalized form with every default filled in.
    nlohmann::json to_json() const;
};

// Parses a config document; unknown keys and unresolvable names raise Config errors.
RunConfig parse_config(const nlohmann::json& doc);
// JSON with comments allowed.
RunConfig load_config(const std::string& path);
nlohmann::json read_json_file(const std::string& path);

// Complex numbers are either a real number or a [re, im] pair.
Complex complex_from_json(const nlohmann::json& j, const std::string& what);

// Builds the sampler settings from the defaults, the base block and an override block.
// A "rate" time distribution requires `reference`; "branch_rate" requires
// `branch_rate`, which builds the density once the strategy is known.
SamplerConfig make_sampler(const nlohmann::json& base, const nlohmann::json& overrides,
                           const PropagationResult* reference,
                           const std::function<RateDensity()>& branch_rate = {});
nlohmann::json sampler_json(const nlohmann::json& base, const nlohmann::json& overrides);

struct InitialState {
    ComplexMatrix rho;
    // Analytic zero-temperature solution, when the state and model admit one.
    std::optional<CoherentSuperpositionOracle> oracle;
};

InitialState build_initial_state(const BuiltModel& model, const nlohmann::json& spec);

// per_order needs the grid from its first pass.
ResummationStrategy make_strategy(const StrategySpec& spec, const OpenSystem& sys,
                                  std::shared_ptr<const PerOrderGrid> grid = nullptr);

}  // namespace qjump
