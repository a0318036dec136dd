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
#include "qjump/branch.hpp"
#include "qjump/models.hpp"
#include "qjump/strategy.hpp"

using namespace qjump;
using namespace qjump::testing;

namespace {

OpenSystem decay_system() { return OpenSystem(ComplexMatrix::Zero(2, 2), {sigma_minus()}); }

ComplexMatrix pauli_z() {
    ComplexMatrix z = ComplexMatrix::Zero(2, 2);
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    return z;
}

}  // namespace

TEST_CASE("NoShift decay of the excited state") {
    const OpenSystem sys = decay_system();
    const auto s = ResummationStrategy::no_shift();
    Branch b = BranchPropagator(sys, s, 0.01).initial(projector(2, 1), Representation::Density);
    const Branch e = evolve_branch(sys, s, b, 1.3, 0.01);
    CHECK((e.density() - std::exp(-1.3) * projector(2, 1)).norm() < 1e-12);
    CHECK(e.current_time == doctest::Approx(1.3));

    const Branch same = evolve_branch(sys, s, e, 1.3, 0.01);
    CHECK((same.density() - e.density()).norm() == 0.0);

    const Branch j = jump_branch(sys, s, e, 0);
    CHECK((j.density() - std::exp(-1.3) * projector(2, 0)).norm() < 1e-12);
    REQUIRE(j.record.size() == 1);
    CHECK(j.record.events()[0].index == 0);
    CHECK(j.record.events()[0].time == doctest::Approx(1.3));
}

TEST_CASE("evaluate_record for the decay model") {
    const OpenSystem sys = decay_system();
    const auto s = ResummationStrategy::no_shift();
    const Branch empty = evaluate_record(sys, s, projector(2, 1), JumpRecord(), 2.0, 0.01);
    CHECK((empty.density() - std::exp(-2.0) * projector(2, 1)).norm() < 1e-12);
    const Branch one = evaluate_record(sys, s, projector(2, 1), JumpRecord({{0, 0.4}}), 2.0, 0.01);
    CHECK((one.density() - std::exp(-0.4) * projector(2, 0)).norm() < 1e-12);
    CHECK(error_of([&] { evaluate_record(sys, s, projector(2, 1), JumpRecord({{0, 3.0}}), 2.0, 0.01); }) ==
          ErrorCode::InvalidArgument);
    CHECK(error_of([&] { evaluate_record(sys, s, projector(2, 1), JumpRecord({{4, 1.0}}), 2.0, 0.01); }) ==
          ErrorCode::IndexOutOfRange);
}

TEST_CASE("Optimal shift keeps a coherent branch unjumped") {
    const Eigen::Index dim = 40;
    const OpenSystem sys = damped_ho(2.0, 1.0, 0.0, dim);
    const ComplexMatrix rho0 = ket_to_density(coherent_ket(dim, Complex(2.0, 1.0)));
    const auto s = ResummationStrategy::optimal();
    // The shift is constant within a step, so the leaked weight is O(dt^2).
    const BranchPropagator prop(sys, s, 5e-4);
    Branch b = prop.initial(rho0);
    prop.evolve(b, 1.0);
    CHECK(b.weight() == doctest::Approx(1.0).epsilon(1e-6));
    const ComplexMatrix want = ket_to_density(coherent_ket(dim, decayed_amplitude(Complex(2.0, 1.0), 1.0, 2.0, 1.0)));
    CHECK((b.density() / b.weight() - want).norm() < 1e-6);
    Branch j = b;
    prop.jump(j, 0);
    CHECK(!(j.alive() && j.weight() > 1e-10 * b.weight()));
}

TEST_CASE("record text round trip") {
    JumpRecord r({{1, 0.125}, {0, 1.0 / 3.0}});
    const JumpRecord back = JumpRecord::from_text(r.to_text());
    REQUIRE(back.size() == 2);
    CHECK(back.events()[1].time == r.events()[1].time);
    CHECK(back.events()[0].index == 1);
}

TEST_CASE("pure branches stay rank one") {
    std::mt19937_64 gen(9);
    const OpenSystem sys = random_system(gen, 4, 2);
    const ComplexVector psi = random_ket(gen, 4);
    const ShiftVector al = random_shift(gen, 2);
    const auto s = ResummationStrategy::fixed(al);
    const Branch b =
        evaluate_record(sys, s, ket_to_density(psi), JumpRecord({{0, 0.2}, {1, 0.5}, {0, 0.9}}), 1.2, 0.005);
    CHECK(is_pure(b.density(), 1e-8));
}

TEST_CASE("ket and density representations agree") {
    std::mt19937_64 gen(10);
    const OpenSystem sys = random_system(gen, 3, 2);
    const ComplexMatrix rho0 = ket_to_density(random_ket(gen, 3));
    const JumpRecord rec({{1, 0.3}, {0, 0.7}});
    for (const auto& s : {ResummationStrategy::no_shift(), ResummationStrategy::optimal(),
                          ResummationStrategy::piecewise_constant(), ResummationStrategy::index_conditioned()}) {
        const BranchPropagator prop(sys, s, 0.002);
        const ComplexMatrix k = prop.evaluate(rho0, rec, 1.0, Representation::Ket).density();
        const ComplexMatrix d = prop.evaluate(rho0, rec, 1.0, Representation::Density).density();
        CHECK((k - d).norm() < 1e-9 * d.norm());
    }
}

TEST_CASE("index-conditioned shifts by hand") {
    const OpenSystem sys(ComplexMatrix::Zero(2, 2), {sigma_minus(), pauli_z()});
    const ShiftVector base = index_conditioned_base(sys);
    CHECK(std::abs(base[0]) == 0.0);
    CHECK(std::abs(base[1]) == 0.0);
    // After sigma_-: rho ~ |0><0|, so alpha = (0, -<0|z|0>) = (0, -1).
    const ShiftVector a1 = index_conditioned_shift(sys, {0});
    CHECK(std::abs(a1[0]) < 1e-15);
    CHECK(std::abs(a1[1] - Complex(-1.0)) < 1e-15);
    // Then z - 1 = diag(0, -2): rho ~ |1><1|, alpha = (0, +1).
    const ShiftVector a2 = index_conditioned_shift(sys, {0, 1});
    CHECK(std::abs(a2[1] - Complex(1.0)) < 1e-15);
    // z first leaves the identity prior unchanged.
    const ShiftVector a3 = index_conditioned_shift(sys, {1, 0});
    CHECK(std::abs(a3[1] - Complex(-1.0)) < 1e-15);

    // Hermitian traceless position operator on a symmetric grid: zero base shift.
    const OpenSystem q = qbm_diffusion(1.0, 1.0, 16, 8.0, 1.0);
    CHECK(std::abs(index_conditioned_base(q)[0]) < 1e-12);
}

TEST_CASE("strategy names round trip") {
    for (auto k : {StrategyKind::NoShift, StrategyKind::Fixed, StrategyKind::Optimal, StrategyKind::PiecewiseConstant,
                   StrategyKind::IndexConditioned, StrategyKind::PerOrder})
        CHECK(parse_strategy_kind(strategy_kind_name(k)) == k);
    CHECK(error_of([] { parse_strategy_kind("bogus"); }) == ErrorCode::Config);
    CHECK(ResummationStrategy::optimal().record_dependent());
    CHECK_FALSE(ResummationStrategy::no_shift().record_dependent());
}

TEST_CASE("expansion is exact for any constant shift") {
    // Summing the cascade oracle to high order reproduces the master equation.
    std::mt19937_64 gen(12);
    const OpenSystem sys = two_level(1.0, 0.4, 0.7);
    const ComplexMatrix rho0 = ket_to_density(random_ket(gen, 2));
    std::vector<ComplexMatrix> ls;
    for (std::size_t j = 0; j < sys.num_jumps(); ++j) ls.push_back(sys.jump(j));
    ComplexMatrix direct = rho0;
    {
        // Plain RK4 on the full generator.
        const int steps = 2000;
        const double h = 1.0 / steps;
        for (int s = 0; s < steps; ++s) {
            const ComplexMatrix k1 = apply_generator(sys, direct);
            const ComplexMatrix k2 = apply_generator(sys, direct + 0.5 * h * k1);
            const ComplexMatrix k3 = apply_generator(sys, direct + 0.5 * h * k2);
            const ComplexMatrix k4 = apply_generator(sys, direct + h * k3);
            direct += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    for (const std::vector<Complex>& al :
         {std::vector<Complex>{0.0, 0.0}, {Complex(0.5, -0.2), 0.3}, {Complex(-1.0, 1.0), Complex(0.0, 2.0)}}) {
        const auto orders = cascade_oracle(sys.hamiltonian(), ls, al, rho0, 30, 1.0, 2000);
        ComplexMatrix sum = ComplexMatrix::Zero(2, 2);
        for (const auto& o : orders) sum += o;
        CHECK((sum - direct).norm() < 1e-9);
    }
}

TEST_CASE("branch evaluation matches the cascade oracle for fixed shifts") {
    // Order 1 from the branch propagator, integrated over the jump time by
    // trapezoid, against the independent cascade.
    const OpenSystem sys = two_level(1.0, 0.5, 1.0);
    ComplexVector psi(2);
    psi << std::sqrt(0.3), std::sqrt(0.7);
    const ComplexMatrix rho0 = ket_to_density(psi);
    ShiftVector al = ShiftVector::zero(2);
    al[0] = Complex(0.3, 0.4);
    al[1] = -0.2;
    const auto s = ResummationStrategy::fixed(al);
    const BranchPropagator prop(sys, s, 0.001);
    const double t = 1.5;
    const int nodes = 601;
    ComplexMatrix order1 = ComplexMatrix::Zero(2, 2);
    for (int i = 0; i < nodes; ++i) {
        const double t1 = t * i / (nodes - 1.0);
        const double w = (i == 0 || i == nodes - 1 ? 0.5 : 1.0) * t / (nodes - 1.0);
        for (int j = 0; j < 2; ++j) order1 += w * prop.evaluate(rho0, JumpRecord({{j, t1}}), t).density();
    }
    std::vector<ComplexMatrix> ls{sys.jump(0), sys.jump(1)};
    const auto orders = cascade_oracle(sys.hamiltonian(), ls, al.alphas, rho0, 1, t, 3000);
    CHECK((order1 - orders[1]).norm() < 1e-5);
    CHECK((prop.evaluate(rho0, JumpRecord(), t).density() - orders[0]).norm() < 1e-7);
}
