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

#include <string>
#include <vector>

#include "json.hpp"

#include "qjump/montecarlo.hpp"

namespace qjump {

// Tr sqrt(sqrt(sigma) rho sqrt(sigma)) before clamping to [0, 1].
double fidelity_raw(const ComplexMatrix& sigma, const ComplexMatrix& rho);
double fidelity(const ComplexMatrix& sigma, const ComplexMatrix& rho);

// Fidelity between rho_exact and the renormalized partial sum of orders 0..k.
double truncated_fidelity(const ComplexMatrix& rho_exact, const ExpansionEstimate& est, std::size_t k);

struct RunMetadata {
    std::uint64_t seed = 0;
    std::size_t n_samples = 0;
    double dt = 0.0;
    double tau = 0.0;
    std::string time_distribution;
};

struct ConvergenceReport {
    std::string strategy;
    std::string model;
    RunMetadata metadata;
    std::vector<std::size_t> k_values;
    std::vector<double> fidelity;
    std::vector<double> fidelity_raw;
    std::vector<double> fidelity_stderr;
    std::vector<double> cumulative_weights;
    std::vector<double> weight_stderr;

    nlohmann::json metadata_json() const;
};

ConvergenceReport build_report(const ComplexMatrix& rho_exact, const ExpansionEstimate& est,
                               const std::string& model, const RunMetadata& metadata);

// Columns: k, fidelity, cum_weight, fidelity_stderr, weight_stderr, preceded by a
// "# {json}" metadata line.
void write_report_csv(const ConvergenceReport& report, const std::string& path);
// Same columns with a leading strategy column, one metadata line per report.
void write_combined_csv(const std::vector<ConvergenceReport>& reports, const std::string& path);

struct WeightSeries {
    std::vector<double> times;
    std::vector<std::vector<double>> weights;  // [time][order]
    std::vector<std::vector<double>> stderr_;  // [time][order]
};

WeightSeries weight_series(const OpenSystem& sys, const ResummationStrategy& strategy, const ComplexMatrix& rho0,
                           const std::vector<double>& times, const SamplerConfig& config);

void write_weight_series_csv(const WeightSeries& series, const std::string& path);

}  // namespace qjump
