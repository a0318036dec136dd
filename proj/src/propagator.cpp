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

#include "qjump/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qjump/errors.hpp"

namespace qjump {

namespace {

constexpr Complex kI(0.0, 1.0);

// Master-equation right-hand side for Hermitian rho: only one product with
// Heff is needed because rho Heff^+ = (Heff rho)^+.
class HermitianGenerator {
public:
    explicit HermitianGenerator(const OpenSystem& sys) : sys_(sys) {}

    void operator()(const ComplexMatrix& rho, ComplexMatrix& out) {
        sys_.effective_op().apply(rho, y_);
        out = -kI * y_;
        out += kI * y_.adjoint();
        for (std::size_t j = 0; j < sys_.num_jumps(); ++j) sys_.jump_op(j).sandwich_add(rho, out);
        y_ = out.adjoint();
        out += y_;
        out *= 0.5;
    }

private:
    const OpenSystem& sys_;
    ComplexMatrix y_;
};

double min_eigenvalue(const ComplexMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(rho), Eigen::EigenvaluesOnly);
    return solver.eigenvalues()[0];
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

PropagationResult propagate(const OpenSystem& sys, const ComplexMatrix& rho0, double t_final,
                            double dt, const PropagationOptions& options) {
    check_state_dim(sys, rho0);
    check_hermitian(rho0, "initial state");
    require(dt > 0.0 && std::isfinite(dt), ErrorCode::InvalidArgument, "dt must be positive");
    require(t_final >= 0.0 && std::isfinite(t_final), ErrorCode::InvalidArgument,
            "t_final must be non-negative");
    require(options.store_every >= 1, ErrorCode::InvalidArgument, "store_every must be >= 1");

    const long steps = t_final > 0.0 ? static_cast<long>(std::ceil(t_final / dt - 1e-9)) : 0;
    const double h = steps > 0 ? t_final / static_cast<double>(steps) : 0.0;

    PropagationResult result;
    result.times.reserve(steps + 1);
    ComplexMatrix rho = hermitian_part(rho0);
    const double trace0 = rho.trace().real();

    auto record = [&](long step) {
        const double t = step == steps ? t_final : static_cast<double>(step) * h;
        result.times.push_back(t);
        const double tr = rho.trace().real();
        result.traces.push_back(tr);
        result.purities.push_back(rho.squaredNorm());
        result.rate_profile.push_back(sys.total_rate_op().trace_with(rho).real());
        result.max_trace_drift = std::max(result.max_trace_drift, std::abs(tr - trace0));
        if (step % options.store_every == 0 || step == steps) {
            const double lambda = min_eigenvalue(rho);
            result.min_eigenvalue = std::min(result.min_eigenvalue, lambda);
            require(lambda >= -options.positivity_tol * std::max(1.0, std::abs(tr)),
                    ErrorCode::StepTooLarge,
                    "positivity lost at t=" + format_double(t) + " (min eigenvalue " +
                        format_double(lambda) + "); reduce dt or enlarge the truncation");
            result.state_times.push_back(t);
            result.states.push_back(rho);
        }
    };

    record(0);
    HermitianGenerator rhs(sys);
    ComplexMatrix k1, k2, k3, k4, tmp;
    for (long step = 1; step <= steps; ++step) {
        const double tr_before = rho.trace().real();
        rhs(rho, k1);
        tmp = rho + (0.5 * h) * k1;
        rhs(tmp, k2);
        tmp = rho + (0.5 * h) * k2;
        rhs(tmp, k3);
        tmp = rho + h * k3;
        rhs(tmp, k4);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        require(all_finite(rho), ErrorCode::StepTooLarge,
                "state diverged at step " + std::to_string(step) + "; reduce dt");
        const double drift = std::abs(rho.trace().real() - tr_before);
        require(drift <= options.step_trace_tol, ErrorCode::StepTooLarge,
                "trace drift " + format_double(drift) + " in one step of size " + format_double(h));
        record(step);
    }
    return result;
}

void write_propagation_csv(const PropagationResult& result, const std::string& path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path);
    out << "time,trace,purity,rate_profile\n";
    for (std::size_t i = 0; i < result.times.size(); ++i) {
        out << format_double(result.times[i]) << ',' << format_double(result.traces[i]) << ','
            << format_double(result.purities[i]) << ',' << format_double(result.rate_profile[i])
            << '\n';
    }
}

RateDensity::RateDensity(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
    require(times_.size() >= 2 && times_.size() == values_.size(), ErrorCode::InvalidArgument,
            "rate density needs at least two matching nodes");
    require(times_.front() == 0.0, ErrorCode::InvalidArgument, "rate density must start at t = 0");
    double vmax = 0.0;
    for (std::size_t i = 0; i < times_.size(); ++i) {
        require(std::isfinite(values_[i]), ErrorCode::NonFinite, "rate profile is not finite");
        if (i > 0)
            require(times_[i] > times_[i - 1], ErrorCode::InvalidArgument,
                    "rate density nodes must be strictly increasing");
        vmax = std::max(vmax, values_[i]);
    }
    for (double& v : values_) {
        require(v >= -1e-12 * vmax, ErrorCode::InvalidArgument, "rate profile is negative");
        v = std::max(v, 0.0);
    }
    require(vmax > 0.0, ErrorCode::DegenerateRates, "rate profile is identically zero");

    cumulative_.assign(times_.size(), 0.0);
    for (std::size_t i = 1; i < times_.size(); ++i)
        cumulative_[i] = cumulative_[i - 1] + 0.5 * (values_[i] + values_[i - 1]) * (times_[i] - times_[i - 1]);
    const double total = cumulative_.back();
    require(total > 0.0, ErrorCode::DegenerateRates, "rate profile integrates to zero");
    for (double& v : values_) v /= total;
    for (double& c : cumulative_) c /= total;
    cumulative_.back() = 1.0;
}

double RateDensity::operator()(double t) const {
    if (t < 0.0 || t > times_.back()) return 0.0;
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = it == times_.end() ? times_.size() - 1 : static_cast<std::size_t>(it - times_.begin());
    if (i == 0) return values_[0];
    const double h = times_[i] - times_[i - 1];
    const double x = (t - times_[i - 1]) / h;
    return values_[i - 1] + x * (values_[i] - values_[i - 1]);
}

double RateDensity::cdf(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= times_.back()) return 1.0;
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times_.begin());
    const double s = t - times_[i - 1];
    const double h = times_[i] - times_[i - 1];
    const double v0 = values_[i - 1];
    const double slope = (values_[i] - v0) / h;
    return cumulative_[i - 1] + v0 * s + 0.5 * slope * s * s;
}

double RateDensity::sample(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
    if (i >= cumulative_.size()) return times_.back();
    if (i == 0) i = 1;
    const double target = u - cumulative_[i - 1];
    const double h = times_[i] - times_[i - 1];
    const double v0 = values_[i - 1];
    const double a = 0.5 * (values_[i] - v0) / h;
    // Solve v0 s + a s^2 = target in the cancellation-free form.
    const double disc = std::max(v0 * v0 + 4.0 * a * target, 0.0);
    const double denom = v0 + std::sqrt(disc);
    double s = denom > 0.0 ? 2.0 * target / denom : 0.0;
    s = std::clamp(s, 0.0, h);
    return times_[i - 1] + s;
}

RateDensity rate_density(const PropagationResult& result) {
    return RateDensity(result.times, result.rate_profile);
}

}  // namespace qjump
