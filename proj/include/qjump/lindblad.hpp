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
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "qjump/linalg.hpp"
#include "qjump/operator.hpp"

namespace qjump {

// Branches whose trace drops below this are treated as dead.
inline constexpr double kTraceEpsilon = 1e-14;

// Markovian generator -i[H, rho] + sum_j (L_j rho L_j^+ - {L_j^+ L_j, rho}/2), hbar = 1.
// Immutable; copies share the same storage.
class OpenSystem {
public:
    OpenSystem(ComplexMatrix hamiltonian, std::vector<ComplexMatrix> jump_ops,
               std::vector<std::string> labels = {});

    Eigen::Index dim() const { return data_->hamiltonian.dim(); }
    std::size_t num_jumps() const { return data_->jumps.size(); }

    const ComplexMatrix& hamiltonian() const { return data_->hamiltonian.dense(); }
    const ComplexMatrix& jump(std::size_t j) const { return jump_op(j).dense(); }
    const std::string& label(std::size_t j) const;
    const std::vector<std::string>& labels() const { return data_->labels; }

    const LinearOperator& hamiltonian_op() const { return data_->hamiltonian; }
    const LinearOperator& jump_op(std::size_t j) const;
    // L_j^+ L_j
    const LinearOperator& rate_op(std::size_t j) const;
    // sum_j L_j^+ L_j
    const LinearOperator& total_rate_op() const { return data_->total_rate; }
    // H - (i/2) sum_j L_j^+ L_j
    const LinearOperator& effective_op() const { return data_->effective; }
    Complex jump_trace(std::size_t j) const { return data_->jump_traces.at(j); }

private:
    struct Data {
        LinearOperator hamiltonian;
        std::vector<LinearOperator> jumps;
        std::vector<LinearOperator> rates;
        LinearOperator total_rate;
        LinearOperator effective;
        std::vector<Complex> jump_traces;
        std::vector<std::string> labels;
    };
    std::shared_ptr<const Data> data_;
};

struct ShiftVector {
    std::vector<Complex> alphas;

    static ShiftVector zero(std::size_t n) { return {std::vector<Complex>(n, Complex(0.0))}; }
    std::size_t size() const { return alphas.size(); }
    Complex operator[](std::size_t j) const { return alphas[j]; }
    Complex& operator[](std::size_t j) { return alphas[j]; }
    bool is_zero() const;
    double squared_norm() const;
};

struct EffectiveHamiltonian {
    ComplexMatrix matrix;
};

void check_shift(const OpenSystem& sys, const ShiftVector& alpha);
void check_state_dim(const OpenSystem& sys, const ComplexMatrix& rho);

ComplexMatrix apply_generator(const OpenSystem& sys, const ComplexMatrix& rho);

// L_j + alpha_j
ComplexMatrix shifted_jump(const OpenSystem& sys, const ShiftVector& alpha, std::size_t j);

// H - (i/2) sum_j (alpha_j^* L_j - alpha_j L_j^+)
ComplexMatrix shifted_hamiltonian(const OpenSystem& sys, const ShiftVector& alpha);

EffectiveHamiltonian effective_hamiltonian(const OpenSystem& sys, const ShiftVector& alpha);

// L_{j,alpha} rho L_{j,alpha}^+
ComplexMatrix apply_jump(const OpenSystem& sys, const ShiftVector& alpha, std::size_t j,
                         const ComplexMatrix& rho);

// -i (H_eff rho - rho H_eff^+)
ComplexMatrix apply_deterministic(const OpenSystem& sys, const ShiftVector& alpha,
                                  const ComplexMatrix& rho);

// Tr[L_{j,alpha}^+ L_{j,alpha} rho] expanded in powers of alpha_j.
double partial_jump_rate(const OpenSystem& sys, const ShiftVector& alpha, std::size_t j,
                         const ComplexMatrix& rho);

double total_jump_rate(const OpenSystem& sys, const ShiftVector& alpha, const ComplexMatrix& rho);

// -Tr[L_j rho] / Tr rho
Complex optimal_shift(const OpenSystem& sys, std::size_t j, const ComplexMatrix& rho);
ShiftVector optimal_shifts(const OpenSystem& sys, const ComplexMatrix& rho);

// Tr[L_j^+ L_j rho] - |Tr[L_j rho]|^2 / Tr rho
double minimal_rate(const OpenSystem& sys, std::size_t j, const ComplexMatrix& rho);

nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j, Eigen::Index dim);

nlohmann::json to_json(const OpenSystem& sys);
OpenSystem open_system_from_json(const nlohmann::json& doc);
void save_open_system(const OpenSystem& sys, const std::string& path);
OpenSystem load_open_system(const std::string& path);

}  // namespace qjump
