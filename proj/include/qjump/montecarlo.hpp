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
#include <memory>
#include <string>
#include <vector>

#include "qjump/branch.hpp"
#include "qjump/propagator.hpp"
#include "qjump/rng.hpp"

namespace qjump {

class TimeDistribution {
public:
    enum class Kind { Uniform, RateWeighted, Sequential };

    static TimeDistribution uniform() { return TimeDistribution(); }
    static TimeDistribution rate_weighted(RateDensity density, std::string label = "rate");
    // Branch-conditioned sampling: each jump time is drawn after the previous
    // one from the current branch's own first-jump density on [t_prev, t],
    // mixed with a uniform density of mass `uniform_fraction`. The times are
    // then no longer independent of the jump indices, so enumerated index
    // sums fall back to index sampling.
    static TimeDistribution sequential(double uniform_fraction = 0.2);

    Kind kind() const { return kind_; }
    const std::string& name() const { return label_; }
    // Density on [0, horizon], renormalized to that interval.
    double pdf(double t, double horizon) const;
    double sample(double u, double horizon) const;
    double uniform_fraction() const { return uniform_fraction_; }

private:
    Kind kind_ = Kind::Uniform;
    double uniform_fraction_ = 0.0;
    std::string label_ = "uniform";
    std::shared_ptr<const RateDensity> density_;
};

enum class IndexSampling { PartialRate, Uniform };

struct SamplerConfig {
    std::size_t n_samples = 1000;
    std::size_t max_order = 5;
    std::uint64_t seed = 1;
    TimeDistribution time_distribution = TimeDistribution::uniform();
    double dt = 0.01;
    // Index tuples are enumerated when num_jumps^n does not exceed this.
    std::size_t index_enum_cap = 256;
    IndexSampling index_sampling = IndexSampling::PartialRate;
    Representation representation = Representation::Auto;
    // Auto uses summed density branches up to this dimension.
    Eigen::Index density_dim_limit = 64;
    std::size_t workers = 1;
    std::size_t error_batches = 4;

    void validate() const;
};

struct JumpTimes {
    std::vector<double> times;  // ascending
    double density = 0.0;       // n! prod_k p(t_k)
};

JumpTimes sample_jump_times(std::size_t n, double t, const TimeDistribution& dist, PhiloxStream& rng);

// How an order-n sample is evaluated.
enum class SampleMode { Summed, Enumerated, Sampled };

struct SamplePlan {
    StateKind kind;
    bool summed;
};

SamplePlan plan_samples(const OpenSystem& sys, const ResummationStrategy& strategy, const ComplexMatrix& rho0,
                        const SamplerConfig& config);
SampleMode sample_mode(const SamplePlan& plan, std::size_t num_jumps, std::size_t n, std::size_t cap);

struct OrderEstimate {
    ComplexMatrix state;
    double weight = 0.0;
    double weight_stderr = 0.0;
    std::size_t samples = 0;
    std::vector<ComplexMatrix> batch_means;
};

OrderEstimate estimate_order(const BranchPropagator& prop, const ComplexMatrix& rho0, std::size_t n, double t,
                             const SamplerConfig& config);
OrderEstimate estimate_order(const OpenSystem& sys, const ResummationStrategy& strategy, const ComplexMatrix& rho0,
                             std::size_t n, double t, const SamplerConfig& config);

struct ExpansionEstimate {
    double time = 0.0;
    std::string strategy;
    std::vector<ComplexMatrix> per_order_states;
    std::vector<double> weights;
    std::vector<double> weight_stderr;
    std::vector<std::size_t> sample_counts;
    std::vector<std::vector<ComplexMatrix>> batch_states;  // [order][batch]
    double elapsed = 0.0;

    std::size_t max_order() const { return per_order_states.empty() ? 0 : per_order_states.size() - 1; }
    double residual() const;
    ComplexMatrix partial_sum(std::size_t k) const;
};

ExpansionEstimate estimate_expansion(const OpenSystem& sys, const ResummationStrategy& strategy,
                                     const ComplexMatrix& rho0, double t, const SamplerConfig& config);

std::vector<double> cumulative_weights(const ExpansionEstimate& est);
// Orders are sampled independently, so variances add.
std::vector<double> cumulative_weight_stderr(const ExpansionEstimate& est);

void write_expansion_csv(const ExpansionEstimate& est, const std::string& path);
void write_expansion_dump(const ExpansionEstimate& est, const std::string& path);
ExpansionEstimate read_expansion_dump(const std::string& path);

// First-jump density w_0(t) sum_j Tr[L_{j,a}^+ L_{j,a} rho_0(t)] / Tr rho_0(t) of the
// zero-jump branch under the propagator's strategy, on `points` uniform nodes of [0, t], mixed with a uniform
// density carrying `uniform_fraction` of the mass.
RateDensity branch_rate_density(const BranchPropagator& prop, const ComplexMatrix& rho0, double t,
                                std::size_t points, double uniform_fraction = 0.25);

// First pass of the per-order strategy: estimates Tr[L_j rho_t^(n)] and Tr rho_t^(n)
// without shifts on `grid_points` uniformly spaced times in [0, t_final].
PerOrderGrid build_per_order_grid(const OpenSystem& sys, const ComplexMatrix& rho0, double t_final,
                                  std::size_t grid_points, const SamplerConfig& config);

}  // namespace qjump
