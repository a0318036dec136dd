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

#include <vector>

#include <Eigen/Sparse>

#include "qjump/linalg.hpp"

namespace qjump {

// Dense matrix plus a cached fast path chosen from its sparsity pattern.
// The dense form stays authoritative; the fast path is only used to apply it.
class LinearOperator {
public:
    enum class Kind { Diagonal, Monomial, Sparse, Dense };

    LinearOperator() = default;
    explicit LinearOperator(ComplexMatrix dense);

    Kind kind() const { return kind_; }
    Eigen::Index dim() const { return dense_.rows(); }
    const ComplexMatrix& dense() const { return dense_; }
    const ComplexVector& diagonal() const { return diag_; }
    bool is_diagonal() const { return kind_ == Kind::Diagonal; }
    double one_norm() const { return one_norm_; }

    // out = A * x ; out must not alias x.
    void apply(const ComplexMatrix& x, ComplexMatrix& out) const;
    ComplexMatrix apply(const ComplexMatrix& x) const;
    // out += s * A * x
    void apply_add(const ComplexMatrix& x, Complex s, ComplexMatrix& out) const;

    // A x A^dagger
    ComplexMatrix sandwich(const ComplexMatrix& x) const;
    // out += A x A^dagger
    void sandwich_add(const ComplexMatrix& x, ComplexMatrix& out) const;

    // Tr(A rho)
    Complex trace_with(const ComplexMatrix& rho) const;
    // psi^dagger A psi for a single column psi
    Complex expectation(const ComplexMatrix& psi) const;

private:
    ComplexMatrix dense_;
    ComplexVector diag_;
    Eigen::SparseMatrix<Complex, Eigen::RowMajor> sparse_;
    // Monomial: row r holds mono_val_[r] at column mono_col_[r], or nothing if mono_col_[r] < 0.
    std::vector<Eigen::Index> mono_col_;
    ComplexVector mono_val_;
    Kind kind_ = Kind::Dense;
    double one_norm_ = 0.0;
};

}  // namespace qjump
