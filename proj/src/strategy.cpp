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

#include "qjump/strategy.hpp"

#include <algorithm>
#include <cmath>

#include "qjump/errors.hpp"

namespace qjump {

void PerOrderGrid::validate(std::size_t num_jumps) const {
    require(times.size() >= 2, ErrorCode::InvalidArgument, "per-order grid needs two time points");
    for (std::size_t i = 1; i < times.size(); ++i)
        require(times[i] > times[i - 1], ErrorCode::InvalidArgument, "per-order grid times not increasing");
    require(!shifts.empty() && shifts.size() == weights.size(), ErrorCode::InvalidArgument,
            "per-order grid order count mismatch");
    for (std::size_t n = 0; n < shifts.size(); ++n) {
        require(shifts[n].size() == times.size() && weights[n].size() == times.size(),
                ErrorCode::InvalidArgument, "per-order grid row length mismatch");
        for (const auto& s : shifts[n])
            require(s.size() == num_jumps, ErrorCode::DimensionMismatch, "per-order shift length");
    }
}

namespace {

// Locate the bracketing interval; returns (i, x) with t = times[i] + x (times[i+1]-times[i]).
std::pair<std::size_t, double> bracket(const PerOrderGrid& grid, double t, std::size_t n) {
    require(n < grid.shifts.size(), ErrorCode::GridRangeError,
            "order " + std::to_string(n) + " beyond per-order grid");
    const auto& ts = grid.times;
    const double slack = 1e-12 * std::max(1.0, std::abs(ts.back()));
    require(t >= ts.front() - slack && t <= ts.back() + slack, ErrorCode::GridRangeError,
            "time " + std::to_string(t) + " outside per-order grid");
    t = std::clamp(t, ts.front(), ts.back());
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t i = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
    if (i >= ts.size() - 1) i = ts.size() - 2;
    const double x = (t - ts[i]) / (ts[i + 1] - ts[i]);
    return {i, x};
}

}  // namespace

std::optional<Complex> per_order_shift(const PerOrderGrid& grid, std::size_t j, double t, std::size_t n) {
    const auto [i, x] = bracket(grid, t, n);
    const auto& w = grid.weights[n];
    const bool left = w[i] > kTraceEpsilon;
    const bool right = w[i + 1] > kTraceEpsilon;
    if (!left && !right) return std::nullopt;
    require(j < grid.shifts[n][i].size(), ErrorCode::IndexOutOfRange, "jump index in per-order grid");
    if (!left) return grid.shifts[n][i + 1][j];
    if (!right) return grid.shifts[n][i][j];
    return (1.0 - x) * grid.shifts[n][i][j] + x * grid.shifts[n][i + 1][j];
}

std::optional<ShiftVector> per_order_shifts(const PerOrderGrid& grid, double t, std::size_t n) {
    const std::size_t nj = grid.shifts.at(0).at(0).size();
    ShiftVector out = ShiftVector::zero(nj);
    for (std::size_t j = 0; j < nj; ++j) {
        auto a = per_order_shift(grid, j, t, n);
        if (!a) return std::nullopt;
        out[j] = *a;
    }
    return out;
}

ResummationStrategy ResummationStrategy::no_shift() { return ResummationStrategy(StrategyKind::NoShift); }

ResummationStrategy ResummationStrategy::fixed(ShiftVector alpha) {
    ResummationStrategy s(StrategyKind::Fixed);
    s.fixed_ = std::move(alpha);
    return s;
}

ResummationStrategy ResummationStrategy::optimal() { return ResummationStrategy(StrategyKind::Optimal); }

ResummationStrategy ResummationStrategy::piecewise_constant() {
    return ResummationStrategy(StrategyKind::PiecewiseConstant);
}

ResummationStrategy ResummationStrategy::index_conditioned() {
    return ResummationStrategy(StrategyKind::IndexConditioned);
}

ResummationStrategy ResummationStrategy::per_order(std::shared_ptr<const PerOrderGrid> grid) {
    require(static_cast<bool>(grid), ErrorCode::InvalidArgument, "per-order strategy needs a grid");
    ResummationStrategy s(StrategyKind::PerOrder);
    s.grid_ = std::move(grid);
    return s;
}

const PerOrderGrid& ResummationStrategy::grid() const {
    require(static_cast<bool>(grid_), ErrorCode::InvalidArgument, "strategy carries no per-order grid");
    return *grid_;
}

bool ResummationStrategy::record_dependent() const {
    return kind_ == StrategyKind::Optimal || kind_ == StrategyKind::PiecewiseConstant ||
           kind_ == StrategyKind::IndexConditioned;
}

bool ResummationStrategy::continuous() const {
    return kind_ == StrategyKind::Optimal || kind_ == StrategyKind::PerOrder;
}

std::string ResummationStrategy::name() const { return strategy_kind_name(kind_); }

const char* strategy_kind_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::NoShift: return "no_shift";
        case StrategyKind::Fixed: return "fixed";
        case StrategyKind::Optimal: return "optimal";
        case StrategyKind::PiecewiseConstant: return "piecewise_constant";
        case StrategyKind::IndexConditioned: return "index_conditioned";
        case StrategyKind::PerOrder: return "per_order";
    }
    return "unknown";
}

StrategyKind parse_strategy_kind(const std::string& name) {
    for (auto k : {StrategyKind::NoShift, StrategyKind::Fixed, StrategyKind::Optimal,
                   StrategyKind::PiecewiseConstant, StrategyKind::IndexConditioned, StrategyKind::PerOrder})
        if (name == strategy_kind_name(k)) return k;
    fail(ErrorCode::Config, "unknown strategy '" + name + "'");
}

ShiftVector index_conditioned_base(const OpenSystem& sys) {
    ShiftVector out = ShiftVector::zero(sys.num_jumps());
    const double d = static_cast<double>(sys.dim());
    for (std::size_t j = 0; j < sys.num_jumps(); ++j) out[j] = -sys.jump_trace(j) / d;
    return out;
}

ShiftVector index_conditioned_step(const OpenSystem& sys, const ShiftVector& prev, std::size_t k) {
    check_shift(sys, prev);
    require(k < sys.num_jumps(), ErrorCode::IndexOutOfRange, "jump index " + std::to_string(k));
    // P = M M^+ is the (unnormalized) state reached from the identity by one jump.
    ComplexMatrix m = sys.jump(k);
    m.diagonal().array() += prev[k];
    const ComplexMatrix p = m * m.adjoint();
    const double denom = p.trace().real();
    require(denom > kTraceEpsilon, ErrorCode::VanishingWeight,
            "index-conditioned recursion hit a vanishing trace");
    ShiftVector out = ShiftVector::zero(sys.num_jumps());
    for (std::size_t j = 0; j < sys.num_jumps(); ++j) out[j] = -sys.jump_op(j).trace_with(p) / denom;
    return out;
}

ShiftVector IndexConditionedShifts::operator()(const std::vector<std::size_t>& indices) {
    auto hit = memo_.find(indices);
    if (hit != memo_.end()) return hit->second;
    ShiftVector alpha;
    if (indices.empty()) {
        alpha = index_conditioned_base(sys_);
    } else {
        std::vector<std::size_t> prefix(indices.begin(), indices.end() - 1);
        alpha = index_conditioned_step(sys_, (*this)(prefix), indices.back());
    }
    memo_.emplace(indices, alpha);
    return alpha;
}

ShiftVector index_conditioned_shift(const OpenSystem& sys, const std::vector<std::size_t>& indices) {
    IndexConditionedShifts table(sys);
    return table(indices);
}

}  // namespace qjump
