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

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qjump/lindblad.hpp"

namespace qjump {

enum class StrategyKind { NoShift, Fixed, Optimal, PiecewiseConstant, IndexConditioned, PerOrder };

// Gridded shifts alpha_j(t, n) = -Tr[L_j rho_t^(n)] / Tr rho_t^(n) together with the
// order weights they were computed from.
struct PerOrderGrid {
    std::vector<double> times;
    std::vector<std::vector<ShiftVector>> shifts;  // [order][time]
    std::vector<std::vector<double>> weights;      // [order][time]

    std::size_t max_order() const { return shifts.empty() ? 0 : shifts.size() - 1; }
    void validate(std::size_t num_jumps) const;
};

// Linear interpolation in t. Returns nullopt when order n carries no estimated
// weight at the bracketing grid points (callers then keep the previous shift).
std::optional<Complex> per_order_shift(const PerOrderGrid& grid, std::size_t j, double t, std::size_t n);
std::optional<ShiftVector> per_order_shifts(const PerOrderGrid& grid, double t, std::size_t n);

class ResummationStrategy {
public:
    static ResummationStrategy no_shift();
    static ResummationStrategy fixed(ShiftVector alpha);
    static ResummationStrategy optimal();
    static ResummationStrategy piecewise_constant();
    static ResummationStrategy index_conditioned();
    static ResummationStrategy per_order(std::shared_ptr<const PerOrderGrid> grid);

    StrategyKind kind() const { return kind_; }
    const ShiftVector& fixed_shift() const { return fixed_; }
    const PerOrderGrid& grid() const;
    bool has_grid() const { return static_cast<bool>(grid_); }

    // Shift depends on the individual jump record (not only on t and n).
    bool record_dependent() const;
    // Shift varies continuously between jumps.
    bool continuous() const;

    std::string name() const;

private:
    explicit ResummationStrategy(StrategyKind kind) : kind_(kind) {}

    StrategyKind kind_;
    ShiftVector fixed_;
    std::shared_ptr<const PerOrderGrid> grid_;
};

const char* strategy_kind_name(StrategyKind kind);
// Accepts the names produced by strategy_kind_name.
StrategyKind parse_strategy_kind(const std::string& name);

// Shift for an empty index list, from the maximally mixed prior: -Tr(L_j) / dim.
ShiftVector index_conditioned_base(const OpenSystem& sys);
// One recursion step: alpha_j' = -Tr(L_j M M^+) / Tr(M M^+), M = L_k + prev_k.
ShiftVector index_conditioned_step(const OpenSystem& sys, const ShiftVector& prev, std::size_t k);

// Full recursion over an index list, memoized per sequence.
class IndexConditionedShifts {
public:
    explicit IndexConditionedShifts(OpenSystem sys) : sys_(std::move(sys)) {}
    ShiftVector operator()(const std::vector<std::size_t>& indices);

private:
    OpenSystem sys_;
    std::map<std::vector<std::size_t>, ShiftVector> memo_;
};

ShiftVector index_conditioned_shift(const OpenSystem& sys, const std::vector<std::size_t>& indices);

}  // namespace qjump
