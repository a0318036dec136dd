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

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qjump/analysis.hpp"
#include "qjump/config.hpp"
#include "qjump/errors.hpp"

namespace qjump {

inline constexpr const char* kOutputDirEnv = "QJUMP_OUTPUT_DIR";

enum class Command { Run, Compare };

struct DriverOptions {
    Command command = Command::Run;
    // Compare: strategy names to evaluate; empty uses the config's list.
    std::vector<std::string> strategies;
    std::optional<std::size_t> workers;
    // Takes precedence over QJUMP_OUTPUT_DIR, which takes precedence over the config.
    std::optional<std::string> output_dir;
    std::ostream* log = nullptr;
};

struct RunOutcome {
    std::string output_dir;
    PropagationResult reference;
    std::vector<ExpansionEstimate> estimates;
    std::vector<ConvergenceReport> reports;
    std::vector<std::string> artifacts;
    // Reference propagation vs the analytic zero-temperature state, when available.
    std::optional<double> analytic_fidelity;
};

std::string resolve_output_dir(const RunConfig& config, const DriverOptions& options);

// Validates everything, then runs one reference propagation and one expansion per
// strategy, and writes the artifacts and manifest.json into the output directory.
RunOutcome execute(const RunConfig& config, const DriverOptions& options);

// Re-runs the command recorded in a manifest.
RunOutcome replay(const std::string& manifest_path, DriverOptions options);

// 2 for configuration problems, 3 for numerical aborts, 1 otherwise.
int exit_code_for(ErrorCode code);

}  // namespace qjump
