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
#include <optional>
#include <random>
#include <vector>

#include "qjump/errors.hpp"
#include "qjump/lindblad.hpp"

namespace qjump::testing {

// Error code thrown by f, or nullopt if it returns normally.
template <class F>
std::optional<ErrorCode> error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

inline ComplexMatrix random_matrix(std::mt19937_64& gen, Eigen::Index n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(gen), g(gen));
    return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64& gen, Eigen::Index n) {
    const ComplexMatrix m = random_matrix(gen, n);
    return 0.5 * (m + m.adjoint());
}

inline ComplexMatrix random_density(std::mt19937_64& gen, Eigen::Index n) {
    const ComplexMatrix b = random_matrix(gen, n);
    ComplexMatrix rho = b * b.adjoint();
    return rho / rho.trace().real();
}

inline ComplexVector random_ket(std::mt19937_64& gen, Eigen::Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(g(gen), g(gen));
    return v / v.norm();
}

inline ShiftVector random_shift(std::mt19937_64& gen, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    ShiftVector a = ShiftVector::zero(n);
    for (std::size_t j = 0; j < n; ++j) a[j] = Complex(g(gen), g(gen));
    return a;
}

inline OpenSystem random_system(std::mt19937_64& gen, Eigen::Index n, std::size_t jumps) {
    std::vector<ComplexMatrix> ls;
    for (std::size_t j = 0; j < jumps; ++j) ls.push_back(random_matrix(gen, n, 0.5));
    return OpenSystem(random_hermitian(gen, n), ls);
}

inline double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    const ComplexMatrix d = a - b;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (d + d.adjoint()));
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline ComplexMatrix sigma_minus() {
    ComplexMatrix s = ComplexMatrix::Zero(2, 2);
    s(0, 1) = 1.0;
    return s;
}

inline ComplexMatrix projector(Eigen::Index n, Eigen::Index k) {
    ComplexMatrix p = ComplexMatrix::Zero(n, n);
    p(k, k) = 1.0;
    return p;
}

// Independent order-by-order cascade for a constant shift, written directly
// from the shifted decomposition: d/dt rho_n = L0 rho_n + J rho_{n-1} with
// H_a = H - (i/2) sum_j (a_j^* L_j - a_j L_j^+), L_{j,a} = L_j + a_j.
// Integrated with classical RK4; returns rho_0 .. rho_K at time t.
inline std::vector<ComplexMatrix> cascade_oracle(const ComplexMatrix& h, const std::vector<ComplexMatrix>& ls,
                                                 const std::vector<Complex>& alpha, const ComplexMatrix& rho0,
                                                 std::size_t max_order, double t, std::size_t steps) {
    const Eigen::Index n = h.rows();
    const Complex I(0.0, 1.0);
    ComplexMatrix ha = h;
    std::vector<ComplexMatrix> la;
    ComplexMatrix gamma = ComplexMatrix::Zero(n, n);
    for (std::size_t j = 0; j < ls.size(); ++j) {
        ha -= 0.5 * I * (std::conj(alpha[j]) * ls[j] - alpha[j] * ls[j].adjoint());
        la.push_back(ls[j] + alpha[j] * ComplexMatrix::Identity(n, n));
        gamma += la.back().adjoint() * la.back();
    }
    const ComplexMatrix heff = ha - 0.5 * I * gamma;
    auto rhs = [&](const std::vector<ComplexMatrix>& r) {
        std::vector<ComplexMatrix> d(r.size());
        for (std::size_t k = 0; k < r.size(); ++k) {
            d[k] = -I * (heff * r[k] - r[k] * heff.adjoint());
            if (k > 0)
                for (const auto& l : la) d[k] += l * r[k - 1] * l.adjoint();
        }
        return d;
    };
    std::vector<ComplexMatrix> r(max_order + 1, ComplexMatrix::Zero(n, n));
    r[0] = rho0;
    const double h_step = t / static_cast<double>(steps);
    auto axpy = [](const std::vector<ComplexMatrix>& a, const std::vector<ComplexMatrix>& b, double s) {
        std::vector<ComplexMatrix> c(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) c[k] = a[k] + s * b[k];
        return c;
    };
    for (std::size_t s = 0; s < steps; ++s) {
        const auto k1 = rhs(r);
        const auto k2 = rhs(axpy(r, k1, 0.5 * h_step));
        const auto k3 = rhs(axpy(r, k2, 0.5 * h_step));
        const auto k4 = rhs(axpy(r, k3, h_step));
        for (std::size_t k = 0; k < r.size(); ++k) r[k] += h_step / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    }
    return r;
}

}  // namespace qjump::testing
