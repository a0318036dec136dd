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

#include "qjump/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "qjump/errors.hpp"

namespace qjump {

Complex trace(const ComplexMatrix& m) { return m.trace(); }

Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    require(a.cols() == b.rows() && a.rows() == b.cols(), ErrorCode::DimensionMismatch,
            "trace_product operand shapes");
    return (a.transpose().array() * b.array()).sum();
}

double one_norm(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

double hermiticity_defect(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) return INFINITY;
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
    if (m.rows() != m.cols()) return false;
    if (m.size() == 0) return true;
    return hermiticity_defect(m) <= rel_tol * m.norm();
}

bool all_finite(const ComplexMatrix& m) { return m.allFinite(); }

void check_square(const ComplexMatrix& m, const char* what) {
    require(m.rows() == m.cols(), ErrorCode::DimensionMismatch,
            std::string(what) + " is not square (" + std::to_string(m.rows()) + "x" +
                std::to_string(m.cols()) + ")");
}

void check_hermitian(const ComplexMatrix& m, const char* what) {
    check_square(m, what);
    require(all_finite(m), ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
    require(is_hermitian(m), ErrorCode::NotHermitian,
            std::string(what) + " is not Hermitian (defect " +
                std::to_string(hermiticity_defect(m)) + ")");
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

HermitianEigenDecomposition hermitian_eig(const ComplexMatrix& m) {
    check_hermitian(m, "matrix");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m));
    require(solver.info() == Eigen::Success, ErrorCode::NonFinite, "eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
    const auto eig = hermitian_eig(m);
    const double scale = m.norm();
    RealVector roots(eig.eigenvalues.size());
    for (Eigen::Index i = 0; i < roots.size(); ++i) {
        const double lambda = eig.eigenvalues[i];
        if (lambda < 0.0) {
            require(lambda >= -kPositiveTol * scale, ErrorCode::NotPositive,
                    "eigenvalue " + std::to_string(lambda) + " below clamp window");
            roots[i] = 0.0;
        } else {
            roots[i] = std::sqrt(lambda);
        }
    }
    return eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.adjoint();
}

ComplexMatrix expm(const ComplexMatrix& m) {
    check_square(m, "expm argument");
    require(all_finite(m), ErrorCode::NonFinite, "expm argument has non-finite entries");
    if (m.size() == 0) return m;
    return m.exp();
}

}  // namespace qjump
