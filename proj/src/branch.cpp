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

#include "qjump/branch.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qjump/errors.hpp"

namespace qjump {

namespace {

constexpr Complex kI(0.0, 1.0);
const double kLogTraceEpsilon = std::log(kTraceEpsilon);

// Taylor substeps are sized so that |G| h stays below this.
constexpr double kTaylorReach = 0.5;
// Series truncation, relative to the squared norm of the partial sum.
constexpr double kTaylorTol = 1e-28;
// Matches the LinearOperator heuristic.
constexpr double kSparseFill = 0.125;

void scale_two_sided(ComplexMatrix& x, const ComplexVector& e) {
    const Eigen::Index n = x.rows();
    for (Eigen::Index c = 0; c < n; ++c) {
        const Complex ec = std::conj(e[c]);
        for (Eigen::Index r = 0; r < n; ++r) x(r, c) *= e[r] * ec;
    }
}

}  // namespace

void JumpRecord::push(int index, double time) { events_.push_back({index, time}); }

void JumpRecord::validate(const OpenSystem& sys) const {
    for (std::size_t i = 0; i < events_.size(); ++i) {
        const auto& e = events_[i];
        require(e.index == kSummedJumps || (e.index >= 0 && static_cast<std::size_t>(e.index) < sys.num_jumps()),
                ErrorCode::IndexOutOfRange, "record event " + std::to_string(i) + " has jump index " +
                                                std::to_string(e.index));
        require(std::isfinite(e.time) && e.time >= 0.0, ErrorCode::InvalidArgument,
                "record event " + std::to_string(i) + " has an invalid time");
        if (i > 0)
            require(e.time >= events_[i - 1].time, ErrorCode::InvalidArgument,
                    "record times must be non-decreasing");
    }
}

std::string JumpRecord::to_text() const {
    std::string out;
    char buf[64];
    for (const auto& e : events_) {
        std::snprintf(buf, sizeof buf, "%d %.17g\n", e.index, e.time);
        out += buf;
    }
    return out;
}

JumpRecord JumpRecord::from_text(const std::string& text) {
    JumpRecord r;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        std::istringstream ls(line);
        int j;
        double t;
        require(static_cast<bool>(ls >> j >> t), ErrorCode::Config, "bad record line '" + line + "'");
        r.push(j, t);
    }
    return r;
}

ComplexMatrix Branch::density() const {
    const double w = weight();
    if (kind == StateKind::Ket) return w * (state * state.adjoint());
    return w * state;
}

void Branch::kill() {
    log_weight = -std::numeric_limits<double>::infinity();
    state.setZero();
}

bool is_pure(const ComplexMatrix& rho, double rel_tol) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(rho), Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    const double top = ev[ev.size() - 1];
    if (!(top > 0.0)) return false;
    if (ev.size() == 1) return true;
    return std::abs(ev[ev.size() - 2]) <= rel_tol * top && std::abs(ev[0]) <= rel_tol * top;
}

BranchPropagator::BranchPropagator(OpenSystem sys, ResummationStrategy strategy, double dt)
    : sys_(std::move(sys)), strategy_(std::move(strategy)), dt_(dt) {
    require(dt > 0.0 && std::isfinite(dt), ErrorCode::InvalidArgument, "dt must be positive");
    if (strategy_.kind() == StrategyKind::Fixed) check_shift(sys_, strategy_.fixed_shift());
    if (strategy_.kind() == StrategyKind::PerOrder) strategy_.grid().validate(sys_.num_jumps());

    const Eigen::Index n = sys_.dim();
    if (sys_.effective_op().is_diagonal()) {
        split_ = Split::DiagonalEffective;
        a_diag_ = sys_.effective_op().diagonal();
        g0_ = LinearOperator(ComplexMatrix::Zero(n, n));
        g0_zero_ = true;
    } else {
        split_ = Split::HamiltonianEigen;
        const auto eig = hermitian_eig(sys_.hamiltonian());
        h_eval_ = eig.eigenvalues;
        h_evec_ = eig.eigenvectors;
        g0_ = LinearOperator(-0.5 * sys_.total_rate_op().dense());
        g0_zero_ = sys_.total_rate_op().dense().isZero(0.0);
    }
    if (g0_.is_diagonal()) g0_diag_ = g0_.diagonal();
    for (std::size_t j = 0; j < sys_.num_jumps(); ++j) jump_diag_.push_back(sys_.jump_op(j).is_diagonal());

    std::vector<const ComplexMatrix*> ops{&g0_.dense()};
    for (std::size_t j = 0; j < sys_.num_jumps(); ++j) ops.push_back(&sys_.jump(j));
    Eigen::Index nnz = 0;
    std::vector<char> used(static_cast<std::size_t>(n * n), 0);
    for (const auto* m : ops)
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c)
                if ((*m)(r, c) != Complex(0.0) && !used[r * n + c]) {
                    used[r * n + c] = 1;
                    ++nnz;
                }
    g_sparse_ = static_cast<double>(nnz) <= kSparseFill * static_cast<double>(n * n);
    if (g_sparse_) {
        g_outer_.assign(1, 0);
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index c = 0; c < n; ++c)
                if (used[r * n + c]) g_inner_.push_back(c);
            g_outer_.push_back(static_cast<Eigen::Index>(g_inner_.size()));
        }
        g_vals_.resize(ops.size());
        for (std::size_t o = 0; o < ops.size(); ++o) {
            g_vals_[o].resize(g_inner_.size());
            for (Eigen::Index r = 0; r < n; ++r)
                for (Eigen::Index e = g_outer_[r]; e < g_outer_[r + 1]; ++e) g_vals_[o][e] = (*ops[o])(r, g_inner_[e]);
        }
    }
}

ShiftVector BranchPropagator::optimal_shift_of(const Branch& b) const {
    ShiftVector alpha = ShiftVector::zero(sys_.num_jumps());
    if (b.kind == StateKind::Ket) {
        const double nrm = b.state.squaredNorm();
        for (std::size_t j = 0; j < sys_.num_jumps(); ++j) alpha[j] = -sys_.jump_op(j).expectation(b.state) / nrm;
    } else {
        const double tr = b.state.trace().real();
        for (std::size_t j = 0; j < sys_.num_jumps(); ++j) alpha[j] = -sys_.jump_op(j).trace_with(b.state) / tr;
    }
    return alpha;
}

Branch BranchPropagator::initial(const ComplexMatrix& rho0, Representation rep) const {
    check_state_dim(sys_, rho0);
    check_hermitian(rho0, "initial state");
    const double tr = rho0.trace().real();
    require(tr > kTraceEpsilon, ErrorCode::VanishingWeight, "initial state has vanishing trace");
    const bool pure = rep != Representation::Density && is_pure(rho0);
    require(rep != Representation::Ket || pure, ErrorCode::InvalidArgument,
            "ket representation requested for a mixed initial state");
    if (pure) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(rho0));
        ComplexVector psi = solver.eigenvectors().col(sys_.dim() - 1);
        Branch b = initial_ket(psi);
        b.log_weight = std::log(tr);
        return b;
    }
    Branch b;
    b.kind = StateKind::Density;
    b.state = hermitian_part(rho0) / tr;
    b.log_weight = std::log(tr);
    after_jump(b, kSummedJumps, ShiftVector::zero(sys_.num_jumps()));
    return b;
}

Branch BranchPropagator::initial_ket(const ComplexVector& psi) const {
    require(psi.size() == sys_.dim(), ErrorCode::DimensionMismatch, "initial ket dimension");
    const double nrm = psi.squaredNorm();
    require(nrm > kTraceEpsilon, ErrorCode::VanishingWeight, "initial ket has vanishing norm");
    Branch b;
    b.kind = StateKind::Ket;
    b.state = psi / std::sqrt(nrm);
    b.log_weight = std::log(nrm);
    after_jump(b, kSummedJumps, ShiftVector::zero(sys_.num_jumps()));
    return b;
}

// Sets the shift at the current point of a branch. Called at t = 0 (record
// empty, j = kSummedJumps) and after every jump with the pre-jump shift.
void BranchPropagator::after_jump(Branch& b, int j, const ShiftVector& pre) const {
    const bool start = b.record.empty();
    switch (strategy_.kind()) {
        case StrategyKind::NoShift:
            b.current_shift = ShiftVector::zero(sys_.num_jumps());
            break;
        case StrategyKind::Fixed:
            b.current_shift = strategy_.fixed_shift();
            break;
        case StrategyKind::Optimal:
        case StrategyKind::PiecewiseConstant:
            b.current_shift = b.alive() ? optimal_shift_of(b) : pre;
            break;
        case StrategyKind::IndexConditioned:
            b.current_shift = start ? index_conditioned_base(sys_)
                                    : index_conditioned_step(sys_, pre, static_cast<std::size_t>(j));
            break;
        case StrategyKind::PerOrder: {
            auto s = per_order_shifts(strategy_.grid(), b.current_time, b.record.size());
            b.current_shift = s ? *s : pre;
            break;
        }
    }
}

bool BranchPropagator::g_is_diagonal(const ShiftVector& alpha) const {
    if (!g0_zero_ && !g0_.is_diagonal()) return false;
    for (std::size_t j = 0; j < alpha.size(); ++j)
        if (alpha[j] != Complex(0.0) && !jump_diag_[j]) return false;
    return true;
}

ComplexVector BranchPropagator::a_phases(double s) const {
    if (split_ == Split::DiagonalEffective) return (-kI * s * a_diag_.array()).exp();
    return (-kI * s * h_eval_.cast<Complex>().array()).exp();
}

void BranchPropagator::apply_a(ComplexMatrix& x, const ComplexVector& e, StateKind kind) const {
    if (split_ == Split::DiagonalEffective) {
        if (kind == StateKind::Ket)
            x = e.asDiagonal() * x;
        else
            scale_two_sided(x, e);
        return;
    }
    if (kind == StateKind::Ket) {
        ComplexMatrix y = h_evec_.adjoint() * x;
        y = e.asDiagonal() * y;
        x.noalias() = h_evec_ * y;
    } else {
        ComplexMatrix y = h_evec_.adjoint() * x * h_evec_;
        scale_two_sided(y, e);
        x.noalias() = h_evec_ * y * h_evec_.adjoint();
    }
}

void BranchPropagator::apply_a(ComplexMatrix& x, double s, StateKind kind) const {
    if (s == 0.0) return;
    apply_a(x, a_phases(s), kind);
}

void BranchPropagator::apply_g_left(ComplexMatrix& x, const ShiftVector& alpha, double h) const {
    const Eigen::Index n = sys_.dim();
    const Eigen::Index cols = x.cols();
    ComplexMatrix term = x, next(n, cols);
    ComplexMatrix y = x;
    auto taylor = [&](auto&& multiply, double norm) {
        if (norm == 0.0) return;
        const int substeps = std::max(1, static_cast<int>(std::ceil(norm * std::abs(h) / kTaylorReach)));
        const double hs = h / substeps;
        for (int s = 0; s < substeps; ++s) {
            term = x;
            y = x;
            for (int k = 1; k <= 60; ++k) {
                multiply(term, next);
                term = next * (hs / k);
                y += term;
                if (term.squaredNorm() <= kTaylorTol * y.squaredNorm()) break;
            }
            x = y;
        }
    };

    if (g_sparse_) {
        std::vector<Complex> vals = g_vals_[0];
        for (std::size_t j = 0; j < alpha.size(); ++j) {
            if (alpha[j] == Complex(0.0)) continue;
            const Complex c = -std::conj(alpha[j]);
            const auto& v = g_vals_[j + 1];
            for (std::size_t e = 0; e < vals.size(); ++e) vals[e] += c * v[e];
        }
        std::vector<double> colsum(static_cast<std::size_t>(n), 0.0);
        for (std::size_t e = 0; e < vals.size(); ++e) colsum[g_inner_[e]] += std::abs(vals[e]);
        const double norm = *std::max_element(colsum.begin(), colsum.end());
        taylor(
            [&](const ComplexMatrix& in, ComplexMatrix& out) {
                for (Eigen::Index c = 0; c < cols; ++c)
                    for (Eigen::Index r = 0; r < n; ++r) {
                        Complex acc(0.0);
                        for (Eigen::Index e = g_outer_[r]; e < g_outer_[r + 1]; ++e)
                            acc += vals[e] * in(g_inner_[e], c);
                        out(r, c) = acc;
                    }
            },
            norm);
        return;
    }
    ComplexMatrix g = g0_.dense();
    for (std::size_t j = 0; j < alpha.size(); ++j)
        if (alpha[j] != Complex(0.0)) g -= std::conj(alpha[j]) * sys_.jump(j);
    taylor([&](const ComplexMatrix& in, ComplexMatrix& out) { out.noalias() = g * in; }, one_norm(g));
}

void BranchPropagator::apply_g(ComplexMatrix& x, const ShiftVector& alpha, double h, StateKind kind) const {
    if (h == 0.0) return;
    if (g_is_diagonal(alpha)) {
        ComplexVector g = g0_zero_ ? ComplexVector::Zero(sys_.dim()) : g0_diag_;
        for (std::size_t j = 0; j < alpha.size(); ++j)
            if (alpha[j] != Complex(0.0)) g -= std::conj(alpha[j]) * sys_.jump_op(j).diagonal();
        if (g.isZero(0.0)) return;
        const ComplexVector e = (h * g.array()).exp();
        if (kind == StateKind::Ket)
            x = e.asDiagonal() * x;
        else
            scale_two_sided(x, e);
        return;
    }
    apply_g_left(x, alpha, h);
    if (kind == StateKind::Density) {
        ComplexMatrix xd = x.adjoint();
        apply_g_left(xd, alpha, h);
        x = xd.adjoint();
    }
}

void BranchPropagator::renormalize(Branch& b, double extra_log) const {
    const double nrm = b.kind == StateKind::Ket ? b.state.squaredNorm() : b.state.trace().real();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) {
        b.kill();
        return;
    }
    const double log_ratio = std::log(nrm) + extra_log;
    if (log_ratio < kLogTraceEpsilon) {
        b.kill();
        return;
    }
    if (b.kind == StateKind::Ket)
        b.state /= std::sqrt(nrm);
    else
        b.state /= nrm;
    b.log_weight += log_ratio;
}

ShiftVector BranchPropagator::shift_during(const Branch& b, double t) const {
    if (strategy_.kind() == StrategyKind::PerOrder) {
        auto s = per_order_shifts(strategy_.grid(), t, b.record.size());
        return s ? *s : b.current_shift;
    }
    return b.current_shift;
}

void BranchPropagator::evolve(Branch& b, double t_target) const {
    const double t0 = b.current_time;
    const double slack = 1e-12 * std::max(1.0, std::abs(t_target));
    require(t_target >= t0 - slack, ErrorCode::InvalidArgument, "evolve target lies in the past");
    const double len = t_target - t0;
    if (!b.alive() || len <= 0.0) {
        if (len > 0.0) b.current_time = t_target;
        return;
    }

    const bool continuous = strategy_.continuous();
    if (!continuous && split_ == Split::DiagonalEffective && g_is_diagonal(b.current_shift)) {
        // All pieces are diagonal and commute: the segment is exact in one step.
        apply_a(b.state, len, b.kind);
        apply_g(b.state, b.current_shift, len, b.kind);
        renormalize(b, -b.current_shift.squared_norm() * len);
        b.current_time = t_target;
        return;
    }

    const long steps = std::max(1L, static_cast<long>(std::ceil(len / dt_ - 1e-9)));
    const double h = len / static_cast<double>(steps);
    const bool optimal = strategy_.kind() == StrategyKind::Optimal;
    ShiftVector alpha = b.current_shift;
    ShiftVector prev_s;
    Branch probe;
    const ComplexVector e_half = a_phases(0.5 * h);
    const ComplexVector e_full = a_phases(h);
    apply_a(b.state, e_half, b.kind);
    for (long k = 0; k < steps; ++k) {
        const double t_mid = t0 + (static_cast<double>(k) + 0.5) * h;
        if (optimal) {
            // Midpoint shift: a half-step predictor on the first step of a
            // segment, linear extrapolation of the step-start shifts after that.
            // Any shift history gives an exact expansion; this only keeps it
            // close to the optimal one at second order in h.
            probe.kind = b.kind;
            probe.state = b.state;
            const ShiftVector s_now = optimal_shift_of(probe);
            if (k == 0) {
                apply_g(probe.state, s_now, 0.5 * h, b.kind);
                alpha = optimal_shift_of(probe);
            } else {
                for (std::size_t j = 0; j < alpha.size(); ++j) alpha[j] = 1.5 * s_now[j] - 0.5 * prev_s[j];
            }
            prev_s = s_now;
        } else if (continuous) {
            alpha = shift_during(b, t_mid);
        }
        apply_g(b.state, alpha, h, b.kind);
        apply_a(b.state, k + 1 == steps ? e_half : e_full, b.kind);
        renormalize(b, -alpha.squared_norm() * h);
        if (!b.alive()) break;
    }
    b.current_time = t_target;
    if (!b.alive()) return;
    if (optimal)
        b.current_shift = optimal_shift_of(b);
    else if (continuous)
        b.current_shift = shift_during(b, t_target);
}

void BranchPropagator::jump(Branch& b, int j) const {
    const ShiftVector pre = b.current_shift;
    b.record.push(j, b.current_time);
    if (!b.alive()) return;
    if (j == kSummedJumps) {
        require(b.kind == StateKind::Density && !strategy_.record_dependent(), ErrorCode::InvalidArgument,
                "summed jumps need a density branch and a record-independent strategy");
        ComplexMatrix out = ComplexMatrix::Zero(sys_.dim(), sys_.dim());
        for (std::size_t k = 0; k < sys_.num_jumps(); ++k) out += apply_jump(sys_, pre, k, b.state);
        b.state = std::move(out);
    } else {
        require(j >= 0 && static_cast<std::size_t>(j) < sys_.num_jumps(), ErrorCode::IndexOutOfRange,
                "jump index " + std::to_string(j));
        const std::size_t k = static_cast<std::size_t>(j);
        if (b.kind == StateKind::Ket) {
            ComplexMatrix y = sys_.jump_op(k).apply(b.state);
            if (pre[k] != Complex(0.0)) y += pre[k] * b.state;
            b.state = std::move(y);
        } else {
            b.state = apply_jump(sys_, pre, k, b.state);
        }
    }
    renormalize(b);
    after_jump(b, j, pre);
}

void BranchPropagator::jump_all(const Branch& b, std::vector<Branch>& out) const {
    out.resize(sys_.num_jumps());
    for (std::size_t j = 0; j < sys_.num_jumps(); ++j) {
        out[j] = b;
        jump(out[j], static_cast<int>(j));
    }
}

Branch BranchPropagator::evaluate(const ComplexMatrix& rho0, const JumpRecord& record, double t,
                                  Representation rep) const {
    record.validate(sys_);
    require(record.empty() || record.events().back().time <= t, ErrorCode::InvalidArgument,
            "record extends past the evaluation time");
    Branch b = initial(rho0, rep);
    for (const auto& e : record.events()) {
        evolve(b, e.time);
        jump(b, e.index);
    }
    evolve(b, t);
    return b;
}

Branch evolve_branch(const OpenSystem& sys, const ResummationStrategy& strategy, const Branch& branch,
                     double t_target, double dt) {
    BranchPropagator prop(sys, strategy, dt);
    Branch b = branch;
    prop.evolve(b, t_target);
    return b;
}

Branch jump_branch(const OpenSystem& sys, const ResummationStrategy& strategy, const Branch& branch, int j) {
    BranchPropagator prop(sys, strategy, 1.0);
    Branch b = branch;
    prop.jump(b, j);
    return b;
}

Branch evaluate_record(const OpenSystem& sys, const ResummationStrategy& strategy, const ComplexMatrix& rho0,
                       const JumpRecord& record, double t, double dt) {
    BranchPropagator prop(sys, strategy, dt);
    return prop.evaluate(rho0, record, t);
}

}  // namespace qjump
