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
#include "qjump/linalg.hpp"
#include "qjump/operator.hpp"

using namespace qjump;
using namespace qjump::testing;

TEST_CASE("hermitian_eig on identity and Pauli z") {
    const auto id = hermitian_eig(ComplexMatrix::Identity(2, 2));
    CHECK(id.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(id.eigenvalues(1) == doctest::Approx(1.0));
    CHECK((id.eigenvectors.adjoint() * id.eigenvectors - ComplexMatrix::Identity(2, 2)).norm() < 1e-14);

    ComplexMatrix z = ComplexMatrix::Zero(2, 2);
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    const auto ez = hermitian_eig(z);
    CHECK(ez.eigenvalues(0) == doctest::Approx(-1.0));
    CHECK(ez.eigenvalues(1) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig reconstructs a random Hermitian matrix") {
    std::mt19937_64 gen(11);
    const ComplexMatrix m = random_hermitian(gen, 8);
    const auto e = hermitian_eig(m);
    for (Eigen::Index i = 1; i < 8; ++i) CHECK(e.eigenvalues(i) >= e.eigenvalues(i - 1));
    const ComplexMatrix back = e.eigenvectors * e.eigenvalues.cast<Complex>().asDiagonal() * e.eigenvectors.adjoint();
    CHECK((back - m).norm() < 1e-12);
    CHECK((e.eigenvectors.adjoint() * e.eigenvectors - ComplexMatrix::Identity(8, 8)).norm() < 1e-12);
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    CHECK(error_of([&] { hermitian_eig(m); }) == ErrorCode::NotHermitian);
}

TEST_CASE("psd_sqrt examples") {
    CHECK((psd_sqrt(ComplexMatrix::Identity(3, 3)) - ComplexMatrix::Identity(3, 3)).norm() < 1e-14);
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 9.0;
    const ComplexMatrix r = psd_sqrt(d);
    CHECK(std::abs(r(0, 0) - 2.0) < 1e-14);
    CHECK(std::abs(r(1, 1) - 3.0) < 1e-14);

    std::mt19937_64 gen(5);
    const ComplexMatrix b = random_matrix(gen, 6);
    const ComplexMatrix a = b.adjoint() * b;
    const ComplexMatrix s = psd_sqrt(a);
    CHECK((s * s - a).norm() < 1e-10);
    CHECK(hermiticity_defect(s) < 1e-12);
}

TEST_CASE("expm examples") {
    CHECK((expm(ComplexMatrix::Zero(3, 3)) - ComplexMatrix::Identity(3, 3)).norm() < 1e-15);
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = Complex(0.3, -1.2);
    d(1, 1) = Complex(-2.0, 0.5);
    const ComplexMatrix ed = expm(d);
    CHECK(std::abs(ed(0, 0) - std::exp(d(0, 0))) < 1e-13);
    CHECK(std::abs(ed(1, 1) - std::exp(d(1, 1))) < 1e-13);
    CHECK(std::abs(ed(0, 1)) < 1e-15);

    ComplexMatrix nil = ComplexMatrix::Zero(2, 2);
    nil(0, 1) = 1.0;
    ComplexMatrix want = ComplexMatrix::Identity(2, 2);
    want(0, 1) = 1.0;
    CHECK((expm(nil) - want).norm() < 1e-14);
}

TEST_CASE("expm inverse property and norm range") {
    std::mt19937_64 gen(21);
    for (int rep = 0; rep < 10; ++rep) {
        ComplexMatrix m = random_matrix(gen, 5);
        m *= 5.0 / one_norm(m);
        const ComplexMatrix p = expm(-m) * expm(m);
        CHECK((p - ComplexMatrix::Identity(5, 5)).norm() < 1e-9);
    }
    // Unitary group element: exp(-iH) for Hermitian H with norm 50.
    ComplexMatrix h = random_hermitian(gen, 6);
    h *= 50.0 / one_norm(h);
    const ComplexMatrix u = expm(Complex(0.0, -1.0) * h);
    CHECK((u.adjoint() * u - ComplexMatrix::Identity(6, 6)).norm() < 1e-11);
}

TEST_CASE("trace is cyclic") {
    std::mt19937_64 gen(3);
    for (int rep = 0; rep < 20; ++rep) {
        const ComplexMatrix a = random_matrix(gen, 7);
        const ComplexMatrix b = random_matrix(gen, 7);
        const Complex ab = trace_product(a, b);
        const Complex ba = trace(b * a);
        CHECK(std::abs(ab - ba) <= 1e-12 * std::abs(ab) + 1e-12);
    }
}

TEST_CASE("validation helpers") {
    ComplexMatrix m = ComplexMatrix::Identity(2, 2);
    CHECK(is_hermitian(m));
    m(0, 0) = Complex(std::nan(""), 0.0);
    CHECK_FALSE(all_finite(m));
    CHECK(error_of([&] { expm(m); }) == ErrorCode::NonFinite);
    CHECK(error_of([] { expm(ComplexMatrix::Zero(2, 3)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("LinearOperator fast paths agree with dense products") {
    std::mt19937_64 gen(8);
    const int n = 12;
    const ComplexMatrix x = random_matrix(gen, n);
    ComplexMatrix diag = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) diag(i, i) = Complex(i, -i);
    ComplexMatrix lower = ComplexMatrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) lower(i, i + 1) = std::sqrt(i + 1.0);
    ComplexMatrix shift = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) shift((i + 3) % n, i) = std::polar(1.0, 0.3 * i);
    ComplexMatrix sparse = lower;
    sparse(0, 5) = Complex(0.0, 2.0);
    const ComplexMatrix dense = random_matrix(gen, n);
    for (const ComplexMatrix& a : {diag, lower, shift, sparse, dense}) {
        const LinearOperator op(a);
        CHECK((op.apply(x) - a * x).norm() < 1e-12);
        ComplexMatrix acc = x;
        op.apply_add(x, Complex(0.5, 2.0), acc);
        CHECK((acc - (x + Complex(0.5, 2.0) * a * x)).norm() < 1e-11);
        CHECK((op.sandwich(x) - a * x * a.adjoint()).norm() < 1e-11);
        ComplexMatrix sum = x;
        op.sandwich_add(x, sum);
        CHECK((sum - x - a * x * a.adjoint()).norm() < 1e-11);
        CHECK(std::abs(op.trace_with(x) - (a * x).trace()) < 1e-12);
        const ComplexMatrix psi = x.col(0);
        CHECK(std::abs(op.expectation(psi) - (psi.adjoint() * a * psi)(0, 0)) < 1e-11);
    }
    CHECK(LinearOperator(diag).kind() == LinearOperator::Kind::Diagonal);
    CHECK(LinearOperator(lower).kind() == LinearOperator::Kind::Monomial);
    CHECK(LinearOperator(shift).kind() == LinearOperator::Kind::Monomial);
    CHECK(LinearOperator(sparse).kind() == LinearOperator::Kind::Sparse);
    CHECK(LinearOperator(dense).kind() == LinearOperator::Kind::Dense);
}
