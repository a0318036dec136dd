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

#include "qjump/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <Eigen/Eigenvalues>

#include "qjump/errors.hpp"

namespace qjump {

namespace {

// Clamps eigenvalues in [-kPositiveTol * Tr, 0) to zero and renormalizes to unit trace.
HermitianEigenDecomposition clean_state(const ComplexMatrix& m, const char* what) {
    check_hermitian(m, what);
    const double tr = m.trace().real();
    require(std::abs(tr - 1.0) <= 1e-6, ErrorCode::InvalidArgument,
            std::string(what) + " does not have unit trace (" + std::to_string(tr) + ")");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m));
    HermitianEigenDecomposition eig{solver.eigenvalues(), solver.eigenvectors()};
    const double floor = -kPositiveTol * std::abs(tr);
    double total = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
        double& l = eig.eigenvalues[i];
        require(l >= floor, ErrorCode::NotPositive,
                std::string(what) + " has eigenvalue " + std::to_string(l) + " below the clamp window");
        l = std::max(l, 0.0);
        total += l;
    }
    eig.eigenvalues /= total;
    return eig;
}

class FidelityReference {
public:
    explicit FidelityReference(const ComplexMatrix& sigma) {
        const auto eig = clean_state(sigma, "reference state");
        sqrt_ = eig.eigenvectors * eig.eigenvalues.cwiseSqrt().asDiagonal() * eig.eigenvectors.adjoint();
    }

    double operator()(const ComplexMatrix& rho) const {
        const auto eig = clean_state(rho, "compared state");
        const ComplexMatrix clean = eig.eigenvectors * eig.eigenvalues.asDiagonal() * eig.eigenvectors.adjoint();
        const ComplexMatrix m = hermitian_part(sqrt_ * clean * sqrt_);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
        double f = 0.0;
        for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) f += std::sqrt(std::max(solver.eigenvalues()[i], 0.0));
        return f;
    }

private:
    ComplexMatrix sqrt_;
};

double clamp01(double f) { return std::clamp(f, 0.0, 1.0); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

double fidelity_raw(const ComplexMatrix& sigma, const ComplexMatrix& rho) {
    require(sigma.rows() == rho.rows() && sigma.cols() == rho.cols(), ErrorCode::DimensionMismatch,
            "fidelity operands differ in shape");
    return FidelityReference(sigma)(rho);
}

double fidelity(const ComplexMatrix& sigma, const ComplexMatrix& rho) { return clamp01(fidelity_raw(sigma, rho)); }

double truncated_fidelity(const ComplexMatrix& rho_exact, const ExpansionEstimate& est, std::size_t k) {
    require(k <= est.max_order(), ErrorCode::IndexOutOfRange, "k beyond the estimated orders");
    const ComplexMatrix partial = est.partial_sum(k);
    const double norm = partial.trace().real();
    require(norm > kTraceEpsilon, ErrorCode::VanishingWeight, "partial sum has vanishing trace");
    return fidelity(rho_exact / rho_exact.trace().real(), partial / norm);
}

nlohmann::json ConvergenceReport::metadata_json() const {
    nlohmann::json j;
    j["strategy"] = strategy;
    j["model"] = model;
    j["seed"] = metadata.seed;
    j["n_samples"] = metadata.n_samples;
    j["dt"] = metadata.dt;
    j["tau"] = metadata.tau;
    j["time_distribution"] = metadata.time_distribution;
    j["fidelity_raw"] = fidelity_raw;
    return j;
}

ConvergenceReport build_report(const ComplexMatrix& rho_exact, const ExpansionEstimate& est,
                               const std::string& model, const RunMetadata& metadata) {
    ConvergenceReport r;
    r.strategy = est.strategy;
    r.model = model;
    r.metadata = metadata;
    r.cumulative_weights = cumulative_weights(est);
    r.weight_stderr = cumulative_weight_stderr(est);
    const FidelityReference ref(rho_exact / rho_exact.trace().real());
    const std::size_t nb = est.batch_states.empty() ? 0 : est.batch_states[0].size();
    std::vector<ComplexMatrix> batch_partial;
    for (std::size_t k = 0; k <= est.max_order(); ++k) {
        r.k_values.push_back(k);
        const ComplexMatrix partial = est.partial_sum(k);
        const double norm = partial.trace().real();
        double raw = std::nan("");
        if (norm > kTraceEpsilon) raw = ref(partial / norm);
        r.fidelity_raw.push_back(raw);
        r.fidelity.push_back(std::isnan(raw) ? 0.0 : clamp01(raw));

        // Spread of the same statistic over independent sample batches.
        if (k == 0) batch_partial.assign(nb, ComplexMatrix());
        std::vector<double> fb;
        for (std::size_t b = 0; b < nb; ++b) {
            if (k == 0)
                batch_partial[b] = est.batch_states[0][b];
            else
                batch_partial[b] += est.batch_states[k][b];
            const double nbk = batch_partial[b].trace().real();
            if (nbk > kTraceEpsilon) fb.push_back(clamp01(ref(batch_partial[b] / nbk)));
        }
        double se = 0.0;
        if (fb.size() >= 2) {
            double mean = 0.0;
            for (double f : fb) mean += f;
            mean /= static_cast<double>(fb.size());
            double ss = 0.0;
            for (double f : fb) ss += (f - mean) * (f - mean);
            se = std::sqrt(ss / static_cast<double>(fb.size() - 1) / static_cast<double>(fb.size()));
        }
        r.fidelity_stderr.push_back(se);
    }
    return r;
}

void write_report_csv(const ConvergenceReport& report, const std::string& path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path);
    out << "# " << report.metadata_json().dump() << '\n';
    out << "k,fidelity,cum_weight,fidelity_stderr,weight_stderr\n";
    for (std::size_t i = 0; i < report.k_values.size(); ++i)
        out << report.k_values[i] << ',' << fmt(report.fidelity[i]) << ',' << fmt(report.cumulative_weights[i]) << ','
            << fmt(report.fidelity_stderr[i]) << ',' << fmt(report.weight_stderr[i]) << '\n';
}

void write_combined_csv(const std::vector<ConvergenceReport>& reports, const std::string& path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path);
    for (const auto& r : reports) out << "# " << r.metadata_json().dump() << '\n';
    out << "strategy,k,fidelity,cum_weight,fidelity_stderr,weight_stderr\n";
    for (const auto& r : reports)
        for (std::size_t i = 0; i < r.k_values.size(); ++i)
            out << r.strategy << ',' << r.k_values[i] << ',' << fmt(r.fidelity[i]) << ','
                << fmt(r.cumulative_weights[i]) << ',' << fmt(r.fidelity_stderr[i]) << ',' << fmt(r.weight_stderr[i])
                << '\n';
}

WeightSeries weight_series(const OpenSystem& sys, const ResummationStrategy& strategy, const ComplexMatrix& rho0,
                           const std::vector<double>& times, const SamplerConfig& config) {
    WeightSeries s;
    s.times = times;
    for (double t : times) {
        const ExpansionEstimate est = estimate_expansion(sys, strategy, rho0, t, config);
        s.weights.push_back(est.weights);
        s.stderr_.push_back(est.weight_stderr);
    }
    return s;
}

void write_weight_series_csv(const WeightSeries& series, const std::string& path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path);
    out << "time,order,weight,stderr\n";
    for (std::size_t i = 0; i < series.times.size(); ++i)
        for (std::size_t n = 0; n < series.weights[i].size(); ++n)
            out << fmt(series.times[i]) << ',' << n << ',' << fmt(series.weights[i][n]) << ','
                << fmt(series.stderr_[i][n]) << '\n';
}

}  // namespace qjump
