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

#include "qjump/operator.hpp"

#include <vector>

#include "qjump/errors.hpp"

namespace qjump {

namespace {

// Sparse storage pays off once fewer than ~1/8 of the entries are populated.
constexpr double kSparseFill = 0.125;

}  // namespace

LinearOperator::LinearOperator(ComplexMatrix dense) : dense_(std::move(dense)) {
    check_square(dense_, "operator");
    const Eigen::Index n = dense_.rows();
    Eigen::Index nnz = 0;
    bool diagonal = true;
    bool monomial = true;
    std::vector<Eigen::Index> row_col(n, -1);
    std::vector<bool> col_used(n, false);
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) {
            if (dense_(r, c) != Complex(0.0)) {
                ++nnz;
                if (r != c) diagonal = false;
                if (row_col[r] >= 0 || col_used[c]) monomial = false;
                row_col[r] = c;
                col_used[c] = true;
            }
        }
    }
    one_norm_ = qjump::one_norm(dense_);
    if (diagonal) {
        kind_ = Kind::Diagonal;
        diag_ = dense_.diagonal();
    } else if (monomial) {
        kind_ = Kind::Monomial;
        mono_col_ = std::move(row_col);
        mono_val_ = ComplexVector::Zero(n);
        for (Eigen::Index r = 0; r < n; ++r)
            if (mono_col_[r] >= 0) mono_val_[r] = dense_(r, mono_col_[r]);
    } else if (static_cast<double>(nnz) <= kSparseFill * static_cast<double>(n * n)) {
        kind_ = Kind::Sparse;
        sparse_ = dense_.sparseView();
        sparse_.makeCompressed();
    } else {
        kind_ = Kind::Dense;
    }
}

void LinearOperator::apply(const ComplexMatrix& x, ComplexMatrix& out) const {
    switch (kind_) {
        case Kind::Diagonal:
            out = diag_.asDiagonal() * x;
            return;
        case Kind::Monomial:
            out.resize(x.rows(), x.cols());
            for (Eigen::Index c = 0; c < x.cols(); ++c)
                for (Eigen::Index r = 0; r < x.rows(); ++r)
                    out(r, c) = mono_col_[r] >= 0 ? mono_val_[r] * x(mono_col_[r], c) : Complex(0.0);
            return;
        case Kind::Sparse:
            out.noalias() = sparse_ * x;
            return;
        case Kind::Dense:
            out.noalias() = dense_ * x;
            return;
    }
}

ComplexMatrix LinearOperator::apply(const ComplexMatrix& x) const {
    ComplexMatrix out(dim(), x.cols());
    apply(x, out);
    return out;
}

void LinearOperator::apply_add(const ComplexMatrix& x, Complex s, ComplexMatrix& out) const {
    switch (kind_) {
        case Kind::Diagonal:
            out += s * (diag_.asDiagonal() * x);
            return;
        case Kind::Monomial:
            for (Eigen::Index c = 0; c < x.cols(); ++c)
                for (Eigen::Index r = 0; r < x.rows(); ++r)
                    if (mono_col_[r] >= 0) out(r, c) += s * mono_val_[r] * x(mono_col_[r], c);
            return;
        case Kind::Sparse:
            for (Eigen::Index c = 0; c < x.cols(); ++c)
                for (Eigen::Index r = 0; r < sparse_.outerSize(); ++r) {
                    Complex acc(0.0);
                    for (decltype(sparse_)::InnerIterator it(sparse_, r); it; ++it) acc += it.value() * x(it.col(), c);
                    out(r, c) += s * acc;
                }
            return;
        case Kind::Dense:
            out.noalias() += s * (dense_ * x);
            return;
    }
}

ComplexMatrix LinearOperator::sandwich(const ComplexMatrix& x) const {
    if (kind_ == Kind::Diagonal) {
        ComplexMatrix out = x;
        const Eigen::Index n = dim();
        for (Eigen::Index c = 0; c < n; ++c) {
            const Complex dc = std::conj(diag_[c]);
            for (Eigen::Index r = 0; r < n; ++r) out(r, c) *= diag_[r] * dc;
        }
        return out;
    }
    if (kind_ == Kind::Monomial) {
        // (A x A^dagger)(r, c) = a_r conj(a_c) x(p_r, p_c)
        const Eigen::Index n = dim();
        ComplexMatrix out = ComplexMatrix::Zero(n, n);
        for (Eigen::Index c = 0; c < n; ++c) {
            if (mono_col_[c] < 0) continue;
            const Complex dc = std::conj(mono_val_[c]);
            const Eigen::Index pc = mono_col_[c];
            for (Eigen::Index r = 0; r < n; ++r)
                if (mono_col_[r] >= 0) out(r, c) = mono_val_[r] * dc * x(mono_col_[r], pc);
        }
        return out;
    }
    // (A (A x)^dagger)^dagger = A x A^dagger
    const ComplexMatrix ax = apply(x);
    const ComplexMatrix axd = ax.adjoint();
    return apply(axd).adjoint();
}

void LinearOperator::sandwich_add(const ComplexMatrix& x, ComplexMatrix& out) const {
    if (kind_ != Kind::Monomial) {
        out += sandwich(x);
        return;
    }
    const Eigen::Index n = dim();
    for (Eigen::Index c = 0; c < n; ++c) {
        if (mono_col_[c] < 0) continue;
        const Complex dc = std::conj(mono_val_[c]);
        const Complex* src = x.col(mono_col_[c]).data();
        Complex* dst = out.col(c).data();
        for (Eigen::Index r = 0; r < n; ++r)
            if (mono_col_[r] >= 0) dst[r] += mono_val_[r] * dc * src[mono_col_[r]];
    }
}

Complex LinearOperator::trace_with(const ComplexMatrix& rho) const {
    switch (kind_) {
        case Kind::Diagonal:
            return (diag_.array() * rho.diagonal().array()).sum();
        case Kind::Monomial: {
            Complex acc(0.0);
            for (Eigen::Index r = 0; r < dim(); ++r)
                if (mono_col_[r] >= 0) acc += mono_val_[r] * rho(mono_col_[r], r);
            return acc;
        }
        case Kind::Sparse: {
            Complex acc(0.0);
            for (Eigen::Index r = 0; r < sparse_.outerSize(); ++r)
                for (decltype(sparse_)::InnerIterator it(sparse_, r); it; ++it)
                    acc += it.value() * rho(it.col(), it.row());
            return acc;
        }
        case Kind::Dense:
            return trace_product(dense_, rho);
    }
    return Complex(0.0);
}

Complex LinearOperator::expectation(const ComplexMatrix& psi) const {
    switch (kind_) {
        case Kind::Diagonal:
            return (psi.col(0).cwiseAbs2().cast<Complex>().array() * diag_.array()).sum();
        case Kind::Monomial: {
            Complex acc(0.0);
            for (Eigen::Index r = 0; r < dim(); ++r)
                if (mono_col_[r] >= 0) acc += std::conj(psi(r, 0)) * mono_val_[r] * psi(mono_col_[r], 0);
            return acc;
        }
        case Kind::Sparse: {
            Complex acc(0.0);
            for (Eigen::Index r = 0; r < sparse_.outerSize(); ++r)
                for (decltype(sparse_)::InnerIterator it(sparse_, r); it; ++it)
                    acc += std::conj(psi(r, 0)) * it.value() * psi(it.col(), 0);
            return acc;
        }
        case Kind::Dense:
            return psi.col(0).dot(dense_ * psi.col(0));
    }
    return Complex(0.0);
}

}  // namespace qjump
