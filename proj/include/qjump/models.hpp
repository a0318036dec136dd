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

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qjump/lindblad.hpp"

namespace qjump {

// ---- Fock space ---------------------------------------------------------

// <n|a|n+1> = sqrt(n+1)
ComplexMatrix annihilation(Eigen::Index dim);
ComplexMatrix number_operator(Eigen::Index dim);
ComplexVector fock_ket(Eigen::Index dim, Eigen::Index n);
// Exact coherent-state amplitudes e^{-|b|^2/2} b^n / sqrt(n!) truncated to dim (not renormalized).
ComplexVector coherent_ket(Eigen::Index dim, Complex beta);
// <a|b> for untruncated coherent states.
Complex coherent_overlap(Complex a, Complex b);
ComplexMatrix ket_to_density(const ComplexVector& psi);
ComplexMatrix thermal_state(Eigen::Index dim, double n_th);

// Population of the top `levels` Fock states relative to the total.
double fock_tail(const ComplexMatrix& rho, Eigen::Index levels = 2);
// TruncationTooSmall if the top two levels hold more than 1e-8 of the population.
void check_fock_truncation(const ComplexMatrix& rho, const std::string& what);

// Damped harmonic oscillator in the canonical Lindblad form; time unit 1/gamma.
// H = omega a^+a, L1 = sqrt(gamma (n_th + 1)) a, L2 = sqrt(gamma n_th) a^+ (omitted for n_th = 0).
OpenSystem damped_ho(double omega, double gamma, double n_th, Eigen::Index fock_dim);

// Superposition c1|beta1> + c2|beta2> decaying at zero temperature.
struct CoherentSuperpositionOracle {
    Complex beta1, beta2;
    Complex c1, c2;
    double gamma = 1.0;
    double omega = 0.0;

    // c1 = c2 chosen so that the state has unit norm.
    static CoherentSuperpositionOracle balanced(Complex beta1, Complex beta2, double gamma, double omega);
    double norm() const;
    ComplexVector initial_ket(Eigen::Index fock_dim) const;
};

// Amplitude of a coherent state under H = omega a^+a and decay rate gamma:
// beta e^{(-gamma/2 - i omega) t}.
Complex decayed_amplitude(Complex beta, double gamma, double omega, double t);

ComplexMatrix zero_t_oracle(const CoherentSuperpositionOracle& oracle, double t, Eigen::Index fock_dim);

// ---- Spatial grids ------------------------------------------------------

// Periodic grid of `points` sites over `extent`, symmetric about 0:
// x_k = (k - (N-1)/2) dx, p_m = 2 pi m / extent for m in [-N/2, N/2).
struct SpatialGrid {
    Eigen::Index points = 0;
    double extent = 0.0;
    double dx = 0.0;
    double dp = 0.0;
    RealVector x;
    RealVector p;
    // Unitary F with F_{mk} = e^{-i p_m x_k} / sqrt(N) (position -> momentum).
    ComplexMatrix dft;
};

SpatialGrid make_grid(Eigen::Index points, double extent);

// Gaussian packet psi(x) ~ exp(-(x - x0)^2 / (4 sigma_x^2) + i k0 x) on the grid, normalized.
// GridTooCoarse if k0 exceeds half the Nyquist momentum; TruncationTooSmall if the
// packet does not fit the grid.
ComplexVector gaussian_packet(const SpatialGrid& grid, double x0, double sigma_x, double k0);
// Same packet expressed in the momentum basis of the grid.
ComplexVector gaussian_packet_momentum(const SpatialGrid& grid, double x0, double sigma_x, double k0);

// Mass for which hbar / (8 pi m gamma) = lambda_th^2 / 15.
double qbm_default_mass(double gamma, double lambda_th);

// Quantum Brownian motion in the position basis; time unit 1/gamma.
// H = p^2 / 2m (spectral), single jump operator sqrt(8 pi gamma / lambda_th^2) x.
OpenSystem qbm_diffusion(double gamma, double lambda_th, Eigen::Index points, double extent, double mass);

struct KickStencil {
    std::vector<int> lattice_shifts;  // q_i / dp
    std::vector<double> q;
    std::vector<double> rates;        // gamma G(q_i) dq, summing to gamma
};

KickStencil kick_stencil(double gamma, double sigma_g, Eigen::Index points, double extent, int n_kicks);

// Mass with 2 m hbar gamma = 4 sigma_g^2.
double colldec_default_mass(double gamma, double sigma_g);

// Collisional decoherence in the momentum basis; time unit 1/gamma. Each kick
// e^{i q_i x} is an exact cyclic translation on the momentum lattice.
OpenSystem collisional_decoherence(double gamma, double sigma_g, Eigen::Index points, double extent, int n_kicks,
                                   double mass);

// ---- Cavity measurement with feedback -----------------------------------

// <+_k|+_n> = cos(pi (n - k) / 2d)
double plus_overlap(int k, int n, int d);
// <-_k|+_n> = i sin(pi (n - k) / 2d)
Complex minus_overlap(int k, int n, int d);

// Jump operators sqrt(gamma / |bases|) M_{+-,k} for every k in bases; in basis 0 the
// "+" outcome also raises the photon number by one. H = omega a^+a.
OpenSystem measurement_feedback(int d, const std::vector<int>& bases, double gamma, double omega,
                                Eigen::Index fock_dim);

// Two-level system with H = omega sigma_z / 2, L1 = sqrt(gamma_down) sigma_-, L2 = sqrt(gamma_up) sigma_+.
OpenSystem two_level(double gamma_down, double gamma_up, double omega);

// ---- Catalog ------------------------------------------------------------

struct ModelParam {
    std::string name;
    std::string type;
    nlohmann::json default_value;
    std::string doc;
};

struct ModelInfo {
    std::string name;
    std::string summary;
    std::string time_unit;
    bool benchmark = true;
    std::vector<ModelParam> params;
};

const std::vector<ModelInfo>& model_catalog();
const ModelInfo& find_model(const std::string& name);

struct BuiltModel {
    std::string name;
    OpenSystem system;
    nlohmann::json params;  // resolved, including defaults
    std::optional<SpatialGrid> grid;
};

BuiltModel build_model(const std::string& name, const nlohmann::json& params);

nlohmann::json catalog_json(bool include_auxiliary);
std::string catalog_text(bool include_auxiliary);

}  // namespace qjump
