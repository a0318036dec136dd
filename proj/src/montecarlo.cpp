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

#include "qjump/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <functional>
#include <optional>
#include <thread>

#include "qjump/errors.hpp"

namespace qjump {

namespace {

// Samples are grouped into fixed chunks; merge order is chunk order, so the
// result never depends on how chunks were spread over threads.
constexpr std::size_t kChunk = 32;
constexpr std::uint32_t kLaneTimes = 0;
constexpr std::uint32_t kLaneIndices = 1;
constexpr std::size_t kSequentialNodes = 400;

template <class Result, class Compute, class Merge>
void run_chunks(std::size_t n_chunks, std::size_t workers, Compute compute, Merge merge) {
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) merge(compute(c));
        return;
    }
    const std::size_t wave = workers * 2;
    for (std::size_t start = 0; start < n_chunks; start += wave) {
        const std::size_t count = std::min(wave, n_chunks - start);
        std::vector<std::optional<Result>> buffer(count);
        std::vector<std::exception_ptr> errors(count);
        std::atomic<std::size_t> next{0};
        auto body = [&] {
            for (std::size_t k; (k = next.fetch_add(1)) < count;) {
                try {
                    buffer[k].emplace(compute(start + k));
                } catch (...) {
                    errors[k] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        const std::size_t threads = std::min(workers, count);
        for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(body);
        for (auto& th : pool) th.join();
        for (std::size_t k = 0; k < count; ++k) {
            if (errors[k]) std::rethrow_exception(errors[k]);
            merge(std::move(*buffer[k]));
        }
    }
}

double log_factorial(std::size_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

struct TimesDraw {
    std::vector<double> times;
    double log_density = 0.0;
    bool valid = true;
};

TimesDraw draw_times(std::size_t n, double t, const TimeDistribution& dist, PhiloxStream& rng) {
    TimesDraw d;
    d.times.resize(n);
    for (auto& s : d.times) s = dist.sample(rng.next_double(), t);
    std::sort(d.times.begin(), d.times.end());
    d.log_density = log_factorial(n);
    for (double s : d.times) {
        const double p = dist.pdf(s, t);
        if (!(p > 0.0)) {
            d.valid = false;
            return d;
        }
        d.log_density += std::log(p);
    }
    return d;
}

using Leaf = std::function<void(Branch&, double)>;

// Walks every jump-index realization of one time sample. `leaf` receives each
// branch right after its last jump, plus the log of its Monte Carlo factor.
void visit_sample(const BranchPropagator& prop, const Branch& start, const std::vector<double>& times,
                  double log_factor, SampleMode mode, IndexSampling sampling, PhiloxStream& idx_rng,
                  const Leaf& leaf) {
    const std::size_t nj = prop.system().num_jumps();
    switch (mode) {
        case SampleMode::Summed: {
            Branch b = start;
            for (double tk : times) {
                prop.evolve(b, tk);
                if (!b.alive()) return;
                prop.jump(b, kSummedJumps);
                if (!b.alive()) return;
            }
            leaf(b, log_factor);
            return;
        }
        case SampleMode::Enumerated: {
            std::vector<Branch> kids;
            std::function<void(Branch&, std::size_t)> dfs = [&](Branch& b, std::size_t level) {
                if (level == times.size()) {
                    leaf(b, log_factor);
                    return;
                }
                prop.evolve(b, times[level]);
                if (!b.alive()) return;
                std::vector<Branch> local;
                prop.jump_all(b, local);
                for (auto& kid : local)
                    if (kid.alive()) dfs(kid, level + 1);
            };
            Branch b = start;
            dfs(b, 0);
            return;
        }
        case SampleMode::Sampled: {
            Branch b = start;
            double extra = 0.0;
            std::vector<Branch> kids;
            for (double tk : times) {
                prop.evolve(b, tk);
                if (!b.alive()) return;
                if (sampling == IndexSampling::Uniform) {
                    const std::size_t j =
                        std::min(nj - 1, static_cast<std::size_t>(idx_rng.next_double() * static_cast<double>(nj)));
                    prop.jump(b, static_cast<int>(j));
                    extra += std::log(static_cast<double>(nj));
                } else {
                    prop.jump_all(b, kids);
                    std::vector<double> rates(nj, 0.0);
                    double total = 0.0;
                    for (std::size_t j = 0; j < nj; ++j) {
                        if (kids[j].alive()) rates[j] = std::exp(kids[j].log_weight - b.log_weight);
                        total += rates[j];
                    }
                    if (!(total > 0.0)) return;
                    const double u = idx_rng.next_double() * total;
                    std::size_t pick = nj;
                    double acc = 0.0;
                    for (std::size_t j = 0; j < nj; ++j) {
                        if (rates[j] <= 0.0) continue;
                        acc += rates[j];
                        pick = j;
                        if (u < acc) break;
                    }
                    extra += std::log(total) - std::log(rates[pick]);
                    b = std::move(kids[pick]);
                }
                if (!b.alive()) return;
            }
            leaf(b, log_factor + extra);
            return;
        }
    }
}

// Sequential jump times along one branch path. At each level the branch is
// probed on a grid up to `t` to build its first-jump density, a time is drawn
// from the mixture with the uniform density, and one jump index is chosen as in
// the sampled mode.
void visit_sequential(const BranchPropagator& prop, const Branch& start, std::size_t n, double t,
                      SampleMode mode, const SamplerConfig& config, PhiloxStream& time_rng,
                      PhiloxStream& idx_rng, const Leaf& leaf) {
    const std::size_t nj = prop.system().num_jumps();
    const double f = config.time_distribution.uniform_fraction();
    Branch b = start;
    double log_factor = 0.0;
    std::vector<Branch> kids;
    auto rate_of = [&](const Branch& c) {
        if (mode == SampleMode::Summed) {
            Branch k = c;
            prop.jump(k, kSummedJumps);
            return k.alive() ? std::exp(k.log_weight - c.log_weight) : 0.0;
        }
        prop.jump_all(c, kids);
        double total = 0.0;
        for (const auto& k : kids)
            if (k.alive()) total += std::exp(k.log_weight - c.log_weight);
        return total;
    };
    for (std::size_t level = 0; level < n; ++level) {
        const double t0 = b.current_time;
        const double span = t - t0;
        if (!(span > 0.0)) return;
        const auto steps = static_cast<std::size_t>(
            std::clamp(std::ceil(span / config.dt), 1.0, static_cast<double>(kSequentialNodes)));
        std::vector<double> nodes(steps + 1), phi(steps + 1, 0.0);
        Branch probe = b;
        for (std::size_t i = 0; i <= steps; ++i) {
            nodes[i] = span * static_cast<double>(i) / static_cast<double>(steps);
            if (i > 0) prop.evolve(probe, t0 + nodes[i]);
            if (!probe.alive()) break;
            phi[i] = std::exp(probe.log_weight - b.log_weight) * rate_of(probe);
        }
        double mass = 0.0;
        for (std::size_t i = 1; i <= steps; ++i) mass += 0.5 * (phi[i] + phi[i - 1]) * (nodes[i] - nodes[i - 1]);
        if (!(mass > 0.0) || !std::isfinite(mass)) return;
        std::vector<double> q(steps + 1);
        for (std::size_t i = 0; i <= steps; ++i) q[i] = (1.0 - f) * phi[i] / mass + f / span;
        const RateDensity density(nodes, q);
        const double s = density.sample(time_rng.next_double());
        const double p = density(s);
        if (!(p > 0.0)) return;
        log_factor -= std::log(p);

        prop.evolve(b, t0 + s);
        if (!b.alive()) return;
        if (mode == SampleMode::Summed) {
            prop.jump(b, kSummedJumps);
        } else if (nj == 1) {
            prop.jump(b, 0);
        } else if (config.index_sampling == IndexSampling::Uniform) {
            const std::size_t j =
                std::min(nj - 1, static_cast<std::size_t>(idx_rng.next_double() * static_cast<double>(nj)));
            prop.jump(b, static_cast<int>(j));
            log_factor += std::log(static_cast<double>(nj));
        } else {
            prop.jump_all(b, kids);
            std::vector<double> rates(nj, 0.0);
            double total = 0.0;
            for (std::size_t j = 0; j < nj; ++j) {
                if (kids[j].alive()) rates[j] = std::exp(kids[j].log_weight - b.log_weight);
                total += rates[j];
            }
            if (!(total > 0.0)) return;
            const double u = idx_rng.next_double() * total;
            std::size_t pick = nj;
            double acc = 0.0;
            for (std::size_t j = 0; j < nj; ++j) {
                if (rates[j] <= 0.0) continue;
                acc += rates[j];
                pick = j;
                if (u < acc) break;
            }
            log_factor += std::log(total) - std::log(rates[pick]);
            b = std::move(kids[pick]);
        }
        if (!b.alive()) return;
    }
    leaf(b, log_factor);
}

struct OrderChunk {
    std::vector<ComplexMatrix> batch_acc;      // density sums, or packed ket columns
    std::vector<std::size_t> batch_counts;
    std::vector<double> traces;
};

std::size_t chunk_count(std::size_t n_samples) { return (n_samples + kChunk - 1) / kChunk; }

}  // namespace

TimeDistribution TimeDistribution::rate_weighted(RateDensity density, std::string label) {
    TimeDistribution d;
    d.kind_ = Kind::RateWeighted;
    d.label_ = std::move(label);
    d.density_ = std::make_shared<const RateDensity>(std::move(density));
    return d;
}

TimeDistribution TimeDistribution::sequential(double uniform_fraction) {
    require(uniform_fraction > 0.0 && uniform_fraction <= 1.0, ErrorCode::Config,
            "sequential uniform_fraction must lie in (0, 1]");
    TimeDistribution d;
    d.kind_ = Kind::Sequential;
    d.label_ = "sequential";
    d.uniform_fraction_ = uniform_fraction;
    return d;
}

double TimeDistribution::pdf(double t, double horizon) const {
    require(kind_ != Kind::Sequential, ErrorCode::InvalidArgument,
            "sequential times have no stand-alone density");
    if (t < 0.0 || t > horizon) return 0.0;
    if (kind_ == Kind::Uniform) return 1.0 / horizon;
    require(horizon <= density_->t_final() * (1.0 + 1e-12), ErrorCode::InvalidArgument,
            "horizon exceeds the rate density support");
    const double mass = density_->cdf(horizon);
    require(mass > 0.0, ErrorCode::DegenerateRates, "rate density has no mass before the horizon");
    return (*density_)(t) / mass;
}

double TimeDistribution::sample(double u, double horizon) const {
    require(kind_ != Kind::Sequential, ErrorCode::InvalidArgument,
            "sequential times are drawn along the branch");
    if (kind_ == Kind::Uniform) return u * horizon;
    require(horizon <= density_->t_final() * (1.0 + 1e-12), ErrorCode::InvalidArgument,
            "horizon exceeds the rate density support");
    const double mass = density_->cdf(horizon);
    require(mass > 0.0, ErrorCode::DegenerateRates, "rate density has no mass before the horizon");
    return std::min(density_->sample(u * mass), horizon);
}

void SamplerConfig::validate() const {
    require(n_samples >= 1, ErrorCode::Config, "n_samples must be >= 1");
    require(dt > 0.0 && std::isfinite(dt), ErrorCode::Config, "dt must be positive");
    require(workers >= 1, ErrorCode::Config, "workers must be >= 1");
    require(error_batches >= 2, ErrorCode::Config, "error_batches must be >= 2");
    require(index_enum_cap >= 1, ErrorCode::Config, "index_enum_cap must be >= 1");
}

RateDensity branch_rate_density(const BranchPropagator& prop, const ComplexMatrix& rho0, double t,
                                std::size_t points, double uniform_fraction) {
    require(points >= 2, ErrorCode::InvalidArgument, "branch rate density needs at least two nodes");
    require(t > 0.0, ErrorCode::InvalidArgument, "branch rate density needs a positive horizon");
    require(uniform_fraction >= 0.0 && uniform_fraction <= 1.0, ErrorCode::InvalidArgument,
            "uniform_fraction must lie in [0, 1]");
    const OpenSystem& sys = prop.system();
    Branch b = prop.initial(rho0);
    std::vector<double> times(points), rates(points, 0.0);
    for (std::size_t i = 0; i < points; ++i) {
        times[i] = t * static_cast<double>(i) / static_cast<double>(points - 1);
        prop.evolve(b, times[i]);
        if (!b.alive()) break;
        const ComplexMatrix rho = b.kind == StateKind::Ket ? ComplexMatrix(b.state * b.state.adjoint()) : b.state;
        const ShiftVector alpha =
            prop.strategy().kind() == StrategyKind::Optimal ? prop.optimal_shift_of(b) : b.current_shift;
        rates[i] = b.weight() * total_jump_rate(sys, alpha, rho) / std::max(rho.trace().real(), 1e-300);
    }
    double mass = 0.0;
    for (std::size_t i = 1; i < points; ++i) mass += 0.5 * (rates[i] + rates[i - 1]) * (times[i] - times[i - 1]);
    std::vector<double> values(points);
    for (std::size_t i = 0; i < points; ++i)
        values[i] = (mass > 0.0 ? (1.0 - uniform_fraction) * std::max(rates[i], 0.0) / mass : 0.0) +
                    (mass > 0.0 ? uniform_fraction : 1.0) / t;
    return RateDensity(std::move(times), std::move(values));
}

JumpTimes sample_jump_times(std::size_t n, double t, const TimeDistribution& dist, PhiloxStream& rng) {
    require(n >= 1, ErrorCode::InvalidArgument, "jump-time sampling needs n >= 1");
    require(t > 0.0, ErrorCode::InvalidArgument, "jump-time horizon must be positive");
    TimesDraw d = draw_times(n, t, dist, rng);
    return {std::move(d.times), d.valid ? std::exp(d.log_density) : 0.0};
}

SamplePlan plan_samples(const OpenSystem& sys, const ResummationStrategy& strategy, const ComplexMatrix& rho0,
                        const SamplerConfig& config) {
    const bool pure = is_pure(rho0);
    const bool summable = !strategy.record_dependent();
    switch (config.representation) {
        case Representation::Ket:
            require(pure, ErrorCode::InvalidArgument, "ket representation needs a pure initial state");
            return {StateKind::Ket, false};
        case Representation::Density:
            return {StateKind::Density, summable};
        case Representation::Auto:
            break;
    }
    if (!pure) return {StateKind::Density, summable};
    if (summable && sys.num_jumps() > 1 && sys.dim() <= config.density_dim_limit) return {StateKind::Density, true};
    return {StateKind::Ket, false};
}

SampleMode sample_mode(const SamplePlan& plan, std::size_t num_jumps, std::size_t n, std::size_t cap) {
    if (plan.summed || num_jumps == 1) return plan.summed ? SampleMode::Summed : SampleMode::Enumerated;
    double tuples = 1.0;
    for (std::size_t k = 0; k < n; ++k) tuples *= static_cast<double>(num_jumps);
    return tuples <= static_cast<double>(cap) ? SampleMode::Enumerated : SampleMode::Sampled;
}

OrderEstimate estimate_order(const BranchPropagator& prop, const ComplexMatrix& rho0, std::size_t n, double t,
                             const SamplerConfig& config) {
    config.validate();
    require(t >= 0.0, ErrorCode::InvalidArgument, "estimation time must be non-negative");
    const OpenSystem& sys = prop.system();
    const SamplePlan plan = plan_samples(sys, prop.strategy(), rho0, config);
    const Representation rep = plan.kind == StateKind::Ket ? Representation::Ket : Representation::Density;
    const std::size_t nb = config.error_batches;
    const Eigen::Index dim = sys.dim();

    OrderEstimate out;
    if (n == 0 || t == 0.0) {
        if (n == 0) {
            out.state = t == 0.0 ? ComplexMatrix(rho0) : prop.evaluate(rho0, JumpRecord(), t, rep).density();
        } else {
            out.state = ComplexMatrix::Zero(dim, dim);
        }
        out.weight = out.state.trace().real();
        out.samples = 1;
        out.batch_means.assign(nb, out.state);
        return out;
    }

    const Branch start = prop.initial(rho0, rep);
    const SampleMode mode = sample_mode(plan, sys.num_jumps(), n, config.index_enum_cap);
    const bool ket = plan.kind == StateKind::Ket;
    const bool sequential = config.time_distribution.kind() == TimeDistribution::Kind::Sequential;
    const std::size_t n_chunks = chunk_count(config.n_samples);

    auto compute = [&](std::size_t c) {
        OrderChunk chunk;
        chunk.batch_counts.assign(nb, 0);
        std::vector<std::vector<ComplexVector>> columns(nb);
        if (!ket) chunk.batch_acc.assign(nb, ComplexMatrix::Zero(dim, dim));
        const std::size_t first = c * kChunk;
        const std::size_t last = std::min(config.n_samples, first + kChunk);
        for (std::size_t i = first; i < last; ++i) {
            const std::size_t batch = i % nb;
            ++chunk.batch_counts[batch];
            PhiloxStream time_rng(config.seed, static_cast<std::uint32_t>(n), i, kLaneTimes);
            PhiloxStream idx_rng(config.seed, static_cast<std::uint32_t>(n), i, kLaneIndices);
            double trace = 0.0;
            const Leaf leaf = [&](Branch& b, double log_factor) {
                prop.evolve(b, t);
                if (!b.alive()) return;
                const double lw = b.log_weight + log_factor;
                const double w = std::exp(lw);
                trace += w;
                if (ket)
                    columns[batch].push_back(std::exp(0.5 * lw) * b.state.col(0));
                else
                    chunk.batch_acc[batch] += w * b.state;
            };
            if (sequential) {
                visit_sequential(prop, start, n, t, mode, config, time_rng, idx_rng, leaf);
            } else {
                TimesDraw draw = draw_times(n, t, config.time_distribution, time_rng);
                if (draw.valid)
                    visit_sample(prop, start, draw.times, -draw.log_density, mode, config.index_sampling, idx_rng,
                                 leaf);
            }
            chunk.traces.push_back(trace);
        }
        if (ket) {
            chunk.batch_acc.resize(nb);
            for (std::size_t b = 0; b < nb; ++b) {
                ComplexMatrix packed(dim, static_cast<Eigen::Index>(columns[b].size()));
                for (std::size_t k = 0; k < columns[b].size(); ++k) packed.col(static_cast<Eigen::Index>(k)) = columns[b][k];
                chunk.batch_acc[b] = std::move(packed);
            }
        }
        return chunk;
    };

    std::vector<ComplexMatrix> acc(nb, ComplexMatrix::Zero(dim, dim));
    std::vector<std::size_t> counts(nb, 0);
    std::vector<double> traces;
    traces.reserve(config.n_samples);
    auto merge = [&](OrderChunk&& chunk) {
        for (std::size_t b = 0; b < nb; ++b) {
            counts[b] += chunk.batch_counts[b];
            if (ket) {
                if (chunk.batch_acc[b].cols() > 0) acc[b].noalias() += chunk.batch_acc[b] * chunk.batch_acc[b].adjoint();
            } else {
                acc[b] += chunk.batch_acc[b];
            }
        }
        traces.insert(traces.end(), chunk.traces.begin(), chunk.traces.end());
    };
    run_chunks<OrderChunk>(n_chunks, config.workers, compute, merge);

    const double N = static_cast<double>(config.n_samples);
    out.state = ComplexMatrix::Zero(dim, dim);
    for (std::size_t b = 0; b < nb; ++b) out.state += acc[b];
    out.state /= N;
    out.state = hermitian_part(out.state);
    out.weight = out.state.trace().real();
    out.samples = config.n_samples;
    out.batch_means.resize(nb);
    for (std::size_t b = 0; b < nb; ++b)
        out.batch_means[b] = counts[b] > 0 ? ComplexMatrix(hermitian_part(acc[b]) / static_cast<double>(counts[b]))
                                           : ComplexMatrix::Zero(dim, dim);
    if (config.n_samples > 1) {
        double mean = 0.0;
        for (double v : traces) mean += v;
        mean /= N;
        double ss = 0.0;
        for (double v : traces) ss += (v - mean) * (v - mean);
        out.weight_stderr = std::sqrt(ss / (N - 1.0) / N);
    }
    return out;
}

OrderEstimate estimate_order(const OpenSystem& sys, const ResummationStrategy& strategy, const ComplexMatrix& rho0,
                             std::size_t n, double t, const SamplerConfig& config) {
    BranchPropagator prop(sys, strategy, config.dt);
    return estimate_order(prop, rho0, n, t, config);
}

double ExpansionEstimate::residual() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return 1.0 - s;
}

ComplexMatrix ExpansionEstimate::partial_sum(std::size_t k) const {
    require(k < per_order_states.size(), ErrorCode::IndexOutOfRange, "partial sum order beyond estimate");
    ComplexMatrix s = per_order_states[0];
    for (std::size_t n = 1; n <= k; ++n) s += per_order_states[n];
    return s;
}

ExpansionEstimate estimate_expansion(const OpenSystem& sys, const ResummationStrategy& strategy,
                                     const ComplexMatrix& rho0, double t, const SamplerConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    BranchPropagator prop(sys, strategy, config.dt);
    ExpansionEstimate est;
    est.time = t;
    est.strategy = strategy.name();
    for (std::size_t n = 0; n <= config.max_order; ++n) {
        OrderEstimate o = estimate_order(prop, rho0, n, t, config);
        est.per_order_states.push_back(std::move(o.state));
        est.weights.push_back(o.weight);
        est.weight_stderr.push_back(o.weight_stderr);
        est.sample_counts.push_back(o.samples);
        est.batch_states.push_back(std::move(o.batch_means));
    }
    est.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return est;
}

std::vector<double> cumulative_weights(const ExpansionEstimate& est) {
    std::vector<double> out;
    double s = 0.0;
    for (double w : est.weights) out.push_back(s += w);
    return out;
}

std::vector<double> cumulative_weight_stderr(const ExpansionEstimate& est) {
    std::vector<double> out;
    double v = 0.0;
    for (double e : est.weight_stderr) {
        v += e * e;
        out.push_back(std::sqrt(v));
    }
    return out;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

constexpr char kDumpMagic[4] = {'Q', 'J', 'X', 'D'};
constexpr std::uint32_t kDumpVersion = 1;

template <class T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    require(static_cast<bool>(in), ErrorCode::Io, "truncated expansion dump");
    return v;
}

}  // namespace

void write_expansion_csv(const ExpansionEstimate& est, const std::string& path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path);
    const auto cum = cumulative_weights(est);
    out << "order,weight,stderr,cumulative,samples\n";
    for (std::size_t n = 0; n < est.weights.size(); ++n)
        out << n << ',' << fmt(est.weights[n]) << ',' << fmt(est.weight_stderr[n]) << ',' << fmt(cum[n]) << ','
            << est.sample_counts[n] << '\n';
}

void write_expansion_dump(const ExpansionEstimate& est, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path);
    out.write(kDumpMagic, 4);
    put(out, kDumpVersion);
    const std::uint64_t dim = est.per_order_states.empty() ? 0 : static_cast<std::uint64_t>(est.per_order_states[0].rows());
    put(out, dim);
    put(out, static_cast<std::uint64_t>(est.per_order_states.size()));
    put(out, est.time);
    for (std::size_t n = 0; n < est.per_order_states.size(); ++n) {
        put(out, est.weights[n]);
        put(out, est.weight_stderr[n]);
        put(out, static_cast<std::uint64_t>(est.sample_counts[n]));
        const ComplexMatrix& m = est.per_order_states[n];
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                put(out, m(r, c).real());
                put(out, m(r, c).imag());
            }
    }
}

ExpansionEstimate read_expansion_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    require(in && std::memcmp(magic, kDumpMagic, 4) == 0, ErrorCode::Io, path + " is not an expansion dump");
    require(get<std::uint32_t>(in) == kDumpVersion, ErrorCode::Io, "unsupported dump version");
    const auto dim = static_cast<Eigen::Index>(get<std::uint64_t>(in));
    const auto orders = get<std::uint64_t>(in);
    ExpansionEstimate est;
    est.time = get<double>(in);
    for (std::uint64_t n = 0; n < orders; ++n) {
        est.weights.push_back(get<double>(in));
        est.weight_stderr.push_back(get<double>(in));
        est.sample_counts.push_back(static_cast<std::size_t>(get<std::uint64_t>(in)));
        ComplexMatrix m(dim, dim);
        for (Eigen::Index r = 0; r < dim; ++r)
            for (Eigen::Index c = 0; c < dim; ++c) {
                const double re = get<double>(in);
                const double im = get<double>(in);
                m(r, c) = Complex(re, im);
            }
        est.per_order_states.push_back(std::move(m));
    }
    return est;
}

PerOrderGrid build_per_order_grid(const OpenSystem& sys, const ComplexMatrix& rho0, double t_final,
                                  std::size_t grid_points, const SamplerConfig& config) {
    config.validate();
    require(t_final > 0.0, ErrorCode::InvalidArgument, "per-order grid needs a positive horizon");
    require(grid_points >= 2, ErrorCode::InvalidArgument, "per-order grid needs two points");
    const std::size_t nj = sys.num_jumps();
    const std::size_t K = config.max_order;
    const BranchPropagator prop(sys, ResummationStrategy::no_shift(), config.dt);
    const SamplePlan plan = plan_samples(sys, prop.strategy(), rho0, config);
    const Representation rep = plan.kind == StateKind::Ket ? Representation::Ket : Representation::Density;

    PerOrderGrid grid;
    for (std::size_t g = 0; g < grid_points; ++g)
        grid.times.push_back(t_final * static_cast<double>(g) / static_cast<double>(grid_points - 1));

    // Moments per grid time: [0] = Tr rho, [1 + j] = Tr[L_j rho].
    using Moments = std::vector<std::vector<Complex>>;
    auto accumulate = [&](Branch& b, double log_factor, std::size_t from, Moments& m) {
        for (std::size_t g = from; g < grid_points; ++g) {
            if (grid.times[g] < b.current_time) continue;
            prop.evolve(b, grid.times[g]);
            if (!b.alive()) return;
            const double w = std::exp(b.log_weight + log_factor);
            m[g][0] += w;
            for (std::size_t j = 0; j < nj; ++j) {
                const Complex lt = b.kind == StateKind::Ket
                                       ? (b.state.adjoint() * sys.jump_op(j).apply(b.state))(0, 0)
                                       : sys.jump_op(j).trace_with(b.state);
                m[g][1 + j] += w * lt;
            }
        }
    };

    const Branch start = prop.initial(rho0, rep);
    for (std::size_t n = 0; n <= K; ++n) {
        Moments total(grid_points, std::vector<Complex>(nj + 1, Complex(0.0)));
        if (n == 0) {
            Branch b = start;
            accumulate(b, 0.0, 0, total);
        } else {
            const SampleMode mode = sample_mode(plan, nj, n, config.index_enum_cap);
            auto compute = [&](std::size_t c) {
                Moments m(grid_points, std::vector<Complex>(nj + 1, Complex(0.0)));
                const std::size_t first = c * kChunk;
                const std::size_t last = std::min(config.n_samples, first + kChunk);
                for (std::size_t i = first; i < last; ++i) {
                    PhiloxStream time_rng(config.seed, static_cast<std::uint32_t>(n), i, kLaneTimes);
                    PhiloxStream idx_rng(config.seed, static_cast<std::uint32_t>(n), i, kLaneIndices);
                    TimesDraw draw = draw_times(n, t_final, config.time_distribution, time_rng);
                    if (!draw.valid) continue;
                    visit_sample(prop, start, draw.times, -draw.log_density, mode, config.index_sampling, idx_rng,
                                 [&](Branch& b, double lf) { accumulate(b, lf, 0, m); });
                }
                return m;
            };
            auto merge = [&](Moments&& m) {
                for (std::size_t g = 0; g < grid_points; ++g)
                    for (std::size_t k = 0; k <= nj; ++k) total[g][k] += m[g][k];
            };
            run_chunks<Moments>(chunk_count(config.n_samples), config.workers, compute, merge);
            for (auto& row : total)
                for (auto& v : row) v /= static_cast<double>(config.n_samples);
        }
        std::vector<ShiftVector> shifts(grid_points, ShiftVector::zero(nj));
        std::vector<double> weights(grid_points, 0.0);
        for (std::size_t g = 0; g < grid_points; ++g) {
            const double w = total[g][0].real();
            weights[g] = w;
            if (w > kTraceEpsilon)
                for (std::size_t j = 0; j < nj; ++j) shifts[g][j] = -total[g][1 + j] / w;
        }
        grid.shifts.push_back(std::move(shifts));
        grid.weights.push_back(std::move(weights));
    }
    return grid;
}

}  // namespace qjump
