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

#include <cstdint>
#include <string>
#include <vector>

#include "qjump/lindblad.hpp"

namespace qjump {

struct PropagationOptions {
    // Keep every k-th state (the final state is always kept).
    int store_every = 1;
    double positivity_tol = 1e-7;
    // Abort when |Tr rho| drifts by more than this in a single step.
    double step_trace_tol = 1e-6;
};

struct PropagationResult {
    // Full integration grid.
    std::vector<double> times;
    std::vector<double> traces;
    std::vector<double> purities;
    std::vector<double> rate_profile;
    // Decimated snapshots.
    std::vector<double> state_times;
    std::vector<ComplexMatrix> states;
    double min_eigenvalue = 0.0;
    double max_trace_drift = 0.0;

    const ComplexMatrix& final_state() const { return states.back(); }
};

// Fixed-step classical RK4 on the full master equation. The step is shrunk to
// t_final / ceil(t_final / dt) so the grid ends exactly on t_final.
PropagationResult propagate(const OpenSystem& sys, const ComplexMatrix& rho0, double t_final,
                            double dt, const PropagationOptions& options = {});

void write_propagation_csv(const PropagationResult& result, const std::string& path);

// Piecewise-linear density on [0, t_final] proportional to the rate profile.
class RateDensity {
public:
    RateDensity(std::vector<double> times, std::vector<double> values);

    double t_final() const { return times_.back(); }
    double operator()(double t) const;
    // Inverse CDF; u in [0, 1).
    double sample(double u) const;
    double cdf(double t) const;

private:
    std::vector<double> times_;
    std::vector<double> values_;  // normalized node values
    std::vector<double> cumulative_;
};

// Throws DegenerateRates if the profile is identically zero.
RateDensity rate_density(const PropagationResult& result);

}  // namespace qjump
