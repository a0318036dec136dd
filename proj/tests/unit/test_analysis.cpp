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

#include <fstream>
#include <sstream>

#include "doctest.h"

#include "helpers.hpp"
#include "qjump/analysis.hpp"
#include "qjump/models.hpp"
#include "qjump/propagator.hpp"
#include "qjump/strategy.hpp"

using namespace qjump;
using namespace qjump::testing;

namespace {

SamplerConfig config(std::size_t n, std::size_t k) {
    SamplerConfig c;
    c.n_samples = n;
    c.max_order = k;
    c.dt = 0.01;
    return c;
}

}  // namespace

TEST_CASE("fidelity examples") {
    std::mt19937_64 gen(1);
    const ComplexMatrix rho = random_density(gen, 4);
    CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fidelity(projector(2, 0), projector(2, 1)) == doctest::Approx(0.0));
    CHECK(fidelity(projector(2, 0), 0.5 * ComplexMatrix::Identity(2, 2)) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    for (int rep = 0; rep < 10; ++rep) {
        const ComplexMatrix a = random_density(gen, 5);
        const ComplexMatrix b = random_density(gen, 5);
        CHECK(std::abs(fidelity(a, b) - fidelity(b, a)) < 1e-9);
    }
}

TEST_CASE("truncated fidelity on a unitary system") {
    std::mt19937_64 gen(2);
    const ComplexMatrix h = random_hermitian(gen, 3);
    const OpenSystem sys(h, {ComplexMatrix::Zero(3, 3)});
    const ComplexMatrix rho0 = ket_to_density(random_ket(gen, 3));
    const ExpansionEstimate e = estimate_expansion(sys, ResummationStrategy::no_shift(), rho0, 1.0, config(10, 2));
    const ComplexMatrix exact = propagate(sys, rho0, 1.0, 1e-3).final_state();
    CHECK(truncated_fidelity(exact, e, 0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("truncated fidelity converges for the decay model") {
    const OpenSystem sys = two_level(1.0, 0.3, 1.0);
    ComplexVector psi(2);
    psi << std::sqrt(0.4), std::sqrt(0.6);
    const ComplexMatrix rho0 = ket_to_density(psi);
    const ExpansionEstimate e = estimate_expansion(sys, ResummationStrategy::no_shift(), rho0, 1.0, config(2000, 6));
    const ComplexMatrix exact = propagate(sys, rho0, 1.0, 1e-3).final_state();
    CHECK(std::abs(e.residual()) <= 1e-3 + 3.0 * cumulative_weight_stderr(e).back());
    CHECK(truncated_fidelity(exact, e, 6) >= 0.99);
    const auto w = cumulative_weights(e);
    for (std::size_t k = 1; k < w.size(); ++k) CHECK(w[k] >= w[k - 1]);
    CHECK(w[0] == e.weights[0]);
}

TEST_CASE("weight series for equal decay rates are Poisson") {
    const OpenSystem sys = two_level(1.0, 1.0, 0.0);
    const WeightSeries s =
        weight_series(sys, ResummationStrategy::no_shift(), projector(2, 1), {0.0, 0.5, 1.0, 2.0}, config(3000, 2));
    CHECK(s.weights[0][0] == 1.0);
    CHECK(s.weights[0][1] == 0.0);
    for (std::size_t i = 1; i < s.times.size(); ++i) {
        const double t = s.times[i];
        CHECK(s.weights[i][0] == doctest::Approx(std::exp(-t)).epsilon(1e-6));
        CHECK(std::abs(s.weights[i][1] - t * std::exp(-t)) <= 3.0 * s.stderr_[i][1] + 1e-12);
    }
}

TEST_CASE("report CSV layout") {
    const OpenSystem sys = two_level(1.0, 0.0, 0.0);
    const ComplexMatrix rho0 = projector(2, 1);
    const ExpansionEstimate e = estimate_expansion(sys, ResummationStrategy::no_shift(), rho0, 1.0, config(100, 2));
    const ComplexMatrix exact = propagate(sys, rho0, 1.0, 1e-3).final_state();
    const ConvergenceReport r = build_report(exact, e, "two_level", {1, 100, 0.01, 1.0, "uniform"});
    const std::string path = "qjump_test_report.csv";
    write_report_csv(r, path);
    std::ifstream in(path);
    std::string meta, header, row;
    std::getline(in, meta);
    std::getline(in, header);
    std::getline(in, row);
    std::remove(path.c_str());
    CHECK(meta.rfind("# {", 0) == 0);
    CHECK(header == "k,fidelity,cum_weight,fidelity_stderr,weight_stderr");
    CHECK(row.rfind("0,", 0) == 0);
    CHECK(r.metadata_json()["seed"] == 1);
}
