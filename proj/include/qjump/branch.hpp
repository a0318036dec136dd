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

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qjump/lindblad.hpp"
#include "qjump/strategy.hpp"

namespace qjump {

// Jump index meaning "all channels summed in one superoperator" (density branches only).
inline constexpr int kSummedJumps = -1;

struct JumpEvent {
    int index;
    double time;
};

class JumpRecord {
public:
    JumpRecord() = default;
    explicit JumpRecord(std::vector<JumpEvent> events) : events_(std::move(events)) {}

    const std::vector<JumpEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }
    void push(int index, double time);
    void pop() { events_.pop_back(); }

    // Times non-decreasing (ties allowed, applied in list order), indices valid.
    void validate(const OpenSystem& sys) const;

    // One "j t" line per event, times at full precision.
    std::string to_text() const;
    static JumpRecord from_text(const std::string& text);

private:
    std::vector<JumpEvent> events_;
};

enum class StateKind { Ket, Density };
enum class Representation { Auto, Ket, Density };

// A record-conditioned branch. The state is stored normalized (unit-norm ket or
// unit-trace density) and the trace of the unnormalized branch is kept as a log.
struct Branch {
    StateKind kind = StateKind::Density;
    ComplexMatrix state;
    double log_weight = 0.0;
    JumpRecord record;
    ShiftVector current_shift;
    double current_time = 0.0;

    bool alive() const { return std::isfinite(log_weight); }
    double weight() const { return alive() ? std::exp(log_weight) : 0.0; }
    // Unnormalized density matrix.
    ComplexMatrix density() const;
    void kill();
};

// Split-exponential stepper for the no-jump evolution of branches under a
// resummation strategy. Construction factorizes the system once; all methods
// are const and safe to call concurrently.
class BranchPropagator {
public:
    BranchPropagator(OpenSystem sys, ResummationStrategy strategy, double dt);

    const OpenSystem& system() const { return sys_; }
    const ResummationStrategy& strategy() const { return strategy_; }
    double dt() const { return dt_; }

    Branch initial(const ComplexMatrix& rho0, Representation rep = Representation::Auto) const;
    Branch initial_ket(const ComplexVector& psi) const;

    void evolve(Branch& b, double t_target) const;
    void jump(Branch& b, int j) const;
    // Post-jump branch for every channel j; entries for dead outcomes are killed.
    void jump_all(const Branch& b, std::vector<Branch>& out) const;

    Branch evaluate(const ComplexMatrix& rho0, const JumpRecord& record, double t,
                    Representation rep = Representation::Auto) const;

    // -Tr[L_j rho] / Tr rho for the normalized branch state.
    ShiftVector optimal_shift_of(const Branch& b) const;

private:
    enum class Split { DiagonalEffective, HamiltonianEigen };

    ComplexVector a_phases(double s) const;
    void apply_a(ComplexMatrix& x, const ComplexVector& phases, StateKind kind) const;
    void apply_a(ComplexMatrix& x, double s, StateKind kind) const;
    void apply_g(ComplexMatrix& x, const ShiftVector& alpha, double h, StateKind kind) const;
    void apply_g_left(ComplexMatrix& x, const ShiftVector& alpha, double h) const;
    bool g_is_diagonal(const ShiftVector& alpha) const;
    ShiftVector shift_during(const Branch& b, double t) const;
    void after_jump(Branch& b, int j, const ShiftVector& pre) const;
    // Renormalizes and updates the log weight; kills on collapse.
    void renormalize(Branch& b, double extra_log = 0.0) const;

    OpenSystem sys_;
    ResummationStrategy strategy_;
    double dt_;
    Split split_;
    ComplexVector a_diag_;             // DiagonalEffective: eigenvalues of Heff_0
    RealVector h_eval_;                // HamiltonianEigen
    ComplexMatrix h_evec_;
    LinearOperator g0_;                // -Gamma/2 for HamiltonianEigen, zero otherwise
    bool g0_zero_ = true;
    ComplexVector g0_diag_;
    std::vector<bool> jump_diag_;
    // Union sparsity pattern (CSR) of g0 and all jump operators, with each
    // operator's values laid out on it; used to assemble G' once per step.
    bool g_sparse_ = false;
    std::vector<Eigen::Index> g_outer_, g_inner_;
    std::vector<std::vector<Complex>> g_vals_;  // [0] = g0, [j + 1] = L_j
};

Branch evolve_branch(const OpenSystem& sys, const ResummationStrategy& strategy, const Branch& branch,
                     double t_target, double dt);
Branch jump_branch(const OpenSystem& sys, const ResummationStrategy& strategy, const Branch& branch, int j);
Branch evaluate_record(const OpenSystem& sys, const ResummationStrategy& strategy, const ComplexMatrix& rho0,
                       const JumpRecord& record, double t, double dt);

// Rank-1 test with a relative eigenvalue threshold.
bool is_pure(const ComplexMatrix& rho, double rel_tol = 1e-12);

}  // namespace qjump
