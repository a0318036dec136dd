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

#include "doctest.h"

#include "helpers.hpp"
#include "qjump/analysis.hpp"
#include "qjump/models.hpp"
#include "qjump/propagator.hpp"

using namespace qjump;
using namespace qjump::testing;

namespace {

const Complex I(0.0, 1.0);
constexpr double kPi = 3.14159265358979323846;

double position_variance(const SpatialGrid& g, const ComplexMatrix& rho) {
    double m1 = 0.0, m2 = 0.0, tr = 0.0;
    for (Eigen::Index k = 0; k < g.points; ++k) {
        const double p = rho(k, k).real();
        tr += p;
        m1 += p * g.x(k);
        m2 += p * g.x(k) * g.x(k);
    }
    m1 /= tr;
    return m2 / tr - m1 * m1;
}

}  // namespace

TEST_CASE("Fock helpers") {
    const ComplexMatrix a = annihilation(5);
    CHECK(std::abs(a(1, 2) - std::sqrt(2.0)) < 1e-15);
    CHECK((a.adjoint() * a - number_operator(5)).norm() < 1e-14);
    CHECK(error_of([] { fock_ket(4, 4); }) == ErrorCode::TruncationTooSmall);
    const Complex b(0.7, -0.4), c(-0.2, 1.1);
    const Complex direct = coherent_ket(60, b).dot(coherent_ket(60, c));
    CHECK(std::abs(direct - coherent_overlap(b, c)) < 1e-12);
    CHECK(thermal_state(40, 0.5).trace().real() == doctest::Approx(1.0));
    CHECK(fock_tail(ket_to_density(fock_ket(10, 9))) == doctest::Approx(1.0));
    CHECK(error_of([] { check_fock_truncation(ket_to_density(fock_ket(10, 9)), "state"); }) ==
          ErrorCode::TruncationTooSmall);
}

TEST_CASE("damped oscillator structure") {
    CHECK(damped_ho(2.0, 1.0, 0.0, 10).num_jumps() == 1);
    CHECK(damped_ho(2.0, 1.0, 0.5, 10).num_jumps() == 2);
    const OpenSystem two = damped_ho(1.0, 0.7, 0.0, 2);
    CHECK((two.jump(0) - std::sqrt(0.7) * sigma_minus()).norm() < 1e-15);
    // Thermal state is the fixed point.
    const Eigen::Index dim = 60;
    const ComplexMatrix th = thermal_state(dim, 0.5);
    CHECK(apply_generator(damped_ho(2.0, 1.0, 0.5, dim), th).norm() < 1e-10);
    CHECK(error_of([] { damped_ho(1.0, -1.0, 0.0, 10); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("zero-temperature cat oracle") {
    const auto o = CoherentSuperpositionOracle::balanced(0.0, 6.0, 1.0, 2.0);
    const double overlap = std::real(std::conj(o.c1) * o.c2 * coherent_overlap(o.beta1, o.beta2));
    CHECK(std::norm(o.c1) + std::norm(o.c2) + 2.0 * overlap == doctest::Approx(1.0).epsilon(1e-14));
    const Eigen::Index dim = 80;
    const ComplexMatrix r0 = zero_t_oracle(o, 0.0, dim);
    CHECK((r0 - ket_to_density(o.initial_ket(dim))).norm() < 1e-12);
    // Coherence between the two decayed components shrinks as e^{-18(1 - e^{-t})}.
    const double t = 0.05;
    const Complex b2 = decayed_amplitude(6.0, 1.0, 2.0, t);
    const ComplexVector k1 = coherent_ket(dim, 0.0), k2 = coherent_ket(dim, b2);
    const double dfac = std::exp(-18.0 * (1.0 - std::exp(-t)));
    const ComplexMatrix want = std::norm(o.c1) * k1 * k1.adjoint() + std::norm(o.c2) * k2 * k2.adjoint() +
                               dfac * (o.c1 * std::conj(o.c2) * k1 * k2.adjoint() +
                                       std::conj(o.c1) * o.c2 * k2 * k1.adjoint());
    CHECK((zero_t_oracle(o, t, dim) - want).norm() < 1e-12);
    // Long times: the coherences are gone and the state approaches the vacuum.
    const ComplexMatrix late = zero_t_oracle(o, 30.0, dim);
    CHECK(std::abs(late(0, 0) - 1.0) < 1e-7);
    CHECK(error_of([&] { zero_t_oracle(o, 1.0, 40); }) == ErrorCode::TruncationTooSmall);
}

TEST_CASE("reference propagator reproduces the cat oracle") {
    const auto o = CoherentSuperpositionOracle::balanced(0.0, 6.0, 1.0, 2.0);
    const Eigen::Index dim = 80;
    const OpenSystem sys = damped_ho(2.0, 1.0, 0.0, dim);
    PropagationOptions opt;
    opt.store_every = 1 << 30;
    const auto r = propagate(sys, ket_to_density(o.initial_ket(dim)), 0.5, 5e-4, opt);
    CHECK(fidelity(zero_t_oracle(o, 0.5, dim), r.final_state()) >= 1.0 - 1e-6);
}

TEST_CASE("QBM free spreading") {
    const Eigen::Index n = 128;
    const double extent = 40.0, mass = 1.0, sigma = 2.0, t = 2.0;
    const OpenSystem sys = qbm_diffusion(0.0, 1.0, n, extent, mass);
    const SpatialGrid g = make_grid(n, extent);
    const ComplexMatrix rho0 = ket_to_density(gaussian_packet(g, 0.0, sigma, 0.0));
    const auto r = propagate(sys, rho0, t, 0.005);
    const double want = sigma * sigma + std::pow(t / (2.0 * mass * sigma), 2);
    CHECK(position_variance(g, r.final_state()) == doctest::Approx(want).epsilon(1e-4));
}

TEST_CASE("QBM generator equals the double commutator") {
    const Eigen::Index n = 32;
    const double extent = 16.0, gamma = 0.7, lam = 1.3, mass = 0.8;
    const OpenSystem sys = qbm_diffusion(gamma, lam, n, extent, mass);
    const SpatialGrid g = make_grid(n, extent);
    ComplexMatrix x = ComplexMatrix::Zero(n, n);
    x.diagonal() = g.x.cast<Complex>();
    const ComplexMatrix p2 = g.dft.adjoint() * g.p.array().square().matrix().cast<Complex>().asDiagonal() * g.dft;
    const ComplexMatrix h = 0.5 * (p2 + p2.adjoint()) / (2.0 * mass);
    const double d = 4.0 * kPi * gamma / (lam * lam);
    std::mt19937_64 gen(4);
    const ComplexMatrix rho = random_density(gen, n);
    const ComplexMatrix xx = x * rho - rho * x;
    const ComplexMatrix want = -I * (h * rho - rho * h) - d * (x * xx - xx * x);
    CHECK((apply_generator(sys, rho) - want).cwiseAbs().maxCoeff() < 1e-10);
    // Symmetric grid: Hermitian traceless L, zero optimal shift on a symmetric packet.
    CHECK(std::abs(sys.jump(0).trace()) < 1e-12);
    CHECK(std::abs(optimal_shift(sys, 0, ket_to_density(gaussian_packet(g, 0.0, 1.0, 0.0)))) < 1e-12);
}

TEST_CASE("QBM spatial coherence decay without dynamics") {
    const Eigen::Index n = 32;
    const double extent = 8.0, gamma = 0.5, t = 0.05;
    const OpenSystem sys = qbm_diffusion(gamma, 1.0, n, extent, 1e12);
    const SpatialGrid g = make_grid(n, extent);
    const ComplexMatrix rho0 = ket_to_density(gaussian_packet(g, 0.0, 0.5, 0.0));
    const ComplexMatrix rt = propagate(sys, rho0, t, 1e-4).final_state();
    const double d = 4.0 * kPi * gamma;
    for (auto [i, j] : {std::pair{14, 17}, std::pair{12, 19}, std::pair{16, 16}}) {
        const double dx = g.x(i) - g.x(j);
        CHECK(std::abs(rt(i, j) / rho0(i, j) - std::exp(-d * dx * dx * t)) < 1e-7);
    }
}

TEST_CASE("grid and packet validation") {
    const SpatialGrid g = make_grid(64, 20.0);
    CHECK(g.dx == doctest::Approx(20.0 / 64));
    CHECK((g.dft.adjoint() * g.dft - ComplexMatrix::Identity(64, 64)).norm() < 1e-12);
    CHECK(error_of([&] { gaussian_packet(g, 0.0, 5.0, 0.0); }) == ErrorCode::TruncationTooSmall);
    CHECK(error_of([&] { gaussian_packet(g, 0.0, 1.0, 9.0); }) == ErrorCode::GridTooCoarse);
    CHECK(error_of([] { qbm_diffusion(1.0, 1.0, 100, 10.0, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("collisional kicks are unitary lattice shifts") {
    const double gamma = 0.8, sigma = 1.0;
    const Eigen::Index n = 96;
    const double extent = 12.0 * kPi;
    const KickStencil st = kick_stencil(gamma, sigma, n, extent, 9);
    double total = 0.0;
    for (double r : st.rates) total += r;
    CHECK(total == doctest::Approx(gamma).epsilon(1e-14));
    const OpenSystem sys = collisional_decoherence(gamma, sigma, n, extent, 9, 2.0);
    CHECK((sys.total_rate_op().dense() - gamma * ComplexMatrix::Identity(n, n)).norm() < 1e-12);
    for (std::size_t i = 0; i < sys.num_jumps(); ++i) {
        const ComplexMatrix l = sys.jump(i);
        CHECK((l.adjoint() * l - st.rates[i] * ComplexMatrix::Identity(n, n)).norm() < 1e-12);
    }
    // In the position basis each kick is multiplication by e^{iqx}.
    const SpatialGrid g = make_grid(n, extent);
    const std::size_t mid = st.q.size() - 1;
    const ComplexMatrix lx = g.dft.adjoint() * sys.jump(mid) * g.dft;
    ComplexMatrix want = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) want(k, k) = std::sqrt(st.rates[mid]) * std::exp(I * st.q[mid] * g.x(k));
    CHECK((lx - want).norm() < 1e-10);

    const OpenSystem single = collisional_decoherence(gamma, sigma, n, extent, 1, 2.0);
    CHECK(single.num_jumps() == 1);
    CHECK((single.jump(0) - std::sqrt(gamma) * ComplexMatrix::Identity(n, n)).norm() < 1e-12);
    CHECK(error_of([] { collisional_decoherence(1.0, 1.0, 24, 20.0, 9, 1.0); }) == ErrorCode::IncommensurateKick);
}

TEST_CASE("collisional coherence decays with the kick characteristic function") {
    const double gamma = 1.0, sigma = 1.0, t = 0.3;
    const Eigen::Index n = 128;
    const double extent = 16.0 * kPi;
    const OpenSystem sys = collisional_decoherence(gamma, sigma, n, extent, 9, 1e12);
    const KickStencil st = kick_stencil(gamma, sigma, n, extent, 9);
    const SpatialGrid g = make_grid(n, extent);
    const ComplexVector psi_x = gaussian_packet(g, 0.0, 3.0, 0.0);
    const ComplexMatrix rho0 = ket_to_density(g.dft * psi_x);
    const ComplexMatrix rt = propagate(sys, rho0, t, 1e-3).final_state();
    const ComplexMatrix x0 = g.dft.adjoint() * rho0 * g.dft;
    const ComplexMatrix xt = g.dft.adjoint() * rt * g.dft;
    for (auto [i, j] : {std::pair{62, 66}, std::pair{60, 70}}) {
        const double d = g.x(i) - g.x(j);
        Complex ghat = 0.0;
        for (std::size_t k = 0; k < st.q.size(); ++k) ghat += st.rates[k] * std::exp(I * st.q[k] * d);
        CHECK(std::abs(xt(i, j) / x0(i, j) - std::exp((ghat - gamma) * t)) < 1e-7);
    }
}

TEST_CASE("measurement operators") {
    const int d = 19;
    CHECK(plus_overlap(0, 19, d) == 0.0);
    CHECK(plus_overlap(0, 0, d) == 1.0);
    CHECK(minus_overlap(0, 0, d) == Complex(0.0));
    const OpenSystem sys = measurement_feedback(d, {0, 10}, 1.0, 0.5, 22);
    CHECK(sys.num_jumps() == 4);
    // Effects of each basis sum to the identity on span{|0>..|d>} (before reindexing).
    for (int k : {0, 10}) {
        Eigen::VectorXd f = Eigen::VectorXd::Zero(d + 1);
        for (int n = 0; n <= d; ++n) f(n) = plus_overlap(k, n, d) * plus_overlap(k, n, d) + std::norm(minus_overlap(k, n, d));
        CHECK((f - Eigen::VectorXd::Ones(d + 1)).norm() < 1e-14);
    }
    // The feedback channel is silent on |19>.
    std::size_t plus0 = sys.num_jumps();
    for (std::size_t j = 0; j < sys.num_jumps(); ++j)
        if (sys.label(j) == "+,0") plus0 = j;
    REQUIRE(plus0 < sys.num_jumps());
    CHECK(partial_jump_rate(sys, ShiftVector::zero(4), plus0, projector(22, 19)) <= 1e-12);
    // Total rate is gamma on the measured span.
    const ComplexMatrix gam = sys.total_rate_op().dense();
    for (int n = 0; n <= d; ++n) CHECK(gam(n, n).real() == doctest::Approx(1.0));
    CHECK(error_of([] { measurement_feedback(19, {0, 0}, 1.0, 0.5, 22); }) == ErrorCode::InvalidArgument);
    CHECK(error_of([] { measurement_feedback(19, {0, 10}, 1.0, 0.5, 20); }) == ErrorCode::TruncationTooSmall);
}

TEST_CASE("feedback stabilizes |19>") {
    const OpenSystem sys = measurement_feedback(19, {0, 10}, 1.0, 0.5, 22);
    ComplexVector psi = coherent_ket(22, 2.0);
    psi /= psi.norm();
    PropagationOptions opt;
    opt.store_every = 100;
    const auto r = propagate(sys, ket_to_density(psi), 40.0, 0.01, opt);
    const std::size_t half = r.states.size() / 2;
    for (std::size_t i = half + 1; i < r.states.size(); ++i)
        CHECK(r.states[i](19, 19).real() > r.states[i - 1](19, 19).real());
}

TEST_CASE("catalog") {
    const auto j = catalog_json(false);
    CHECK(j["models"].size() == 4);
    CHECK(catalog_json(true)["models"].size() == 5);
    CHECK(error_of([] { find_model("nope"); }) == ErrorCode::Config);
    const BuiltModel m = build_model("qbm", nlohmann::json::object());
    CHECK(m.params["points"] == 256);
    CHECK(m.params["mass"].get<double>() == doctest::Approx(qbm_default_mass(1.0, 1.0)));
    CHECK(error_of([] { build_model("qbm", {{"bogus", 1}}); }) == ErrorCode::Config);
    CHECK(error_of([] { build_model("qbm", {{"points", "many"}}); }) == ErrorCode::Config);
    CHECK(catalog_text(false).find("two_level") == std::string::npos);
}
