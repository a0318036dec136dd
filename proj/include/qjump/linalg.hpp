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

#include <complex>

#include <Eigen/Dense>

namespace qjump {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-9;
inline constexpr double kPositiveTol = 1e-8;

struct HermitianEigenDecomposition {
    RealVector eigenvalues;     // ascending
    ComplexMatrix eigenvectors; // columns are orthonormal eigenvectors
};

inline ComplexMatrix dagger(const ComplexMatrix& m) { return m.adjoint(); }

Complex trace(const ComplexMatrix& m);

// Tr(A B) without forming the product.
Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

double one_norm(const ComplexMatrix& m);

// max |M - M^dagger|_ij
double hermiticity_defect(const ComplexMatrix& m);

bool is_hermitian(const ComplexMatrix& m, double rel_tol = kHermitianTol);

bool all_finite(const ComplexMatrix& m);

// Throws NotHermitian / NonFinite / DimensionMismatch with `what` in the message.
void check_hermitian(const ComplexMatrix& m, const char* what);

void check_square(const ComplexMatrix& m, const char* what);

ComplexMatrix hermitian_part(const ComplexMatrix& m);

HermitianEigenDecomposition hermitian_eig(const ComplexMatrix& m);

// Principal square root of a positive semidefinite matrix. Eigenvalues in
// [-kPositiveTol * |M|, 0) are clamped to zero; anything more negative is an error.
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

ComplexMatrix expm(const ComplexMatrix& m);

}  // namespace qjump
