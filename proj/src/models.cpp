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

#include "qjump/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qjump/errors.hpp"

namespace qjump {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTailTol = 1e-8;

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

void require_positive(double v, const char* what) {
    require(std::isfinite(v) && v > 0.0, ErrorCode::InvalidArgument, std::string(what) + " must be positive");
}

void require_nonnegative(double v, const char* what) {
    require(std::isfinite(v) && v >= 0.0, ErrorCode::InvalidArgument, std::string(what) + " must be non-negative");
}

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

// ---- Fock space ---------------------------------------------------------

ComplexMatrix annihilation(Eigen::Index dim) {
    require(dim >= 1, ErrorCode::InvalidArgument, "Fock dimension must be positive");
    ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index n = 0; n + 1 < dim; ++n) a(n, n + 1) = std::sqrt(static_cast<double>(n + 1));
    return a;
}

ComplexMatrix number_operator(Eigen::Index dim) {
    require(dim >= 1, ErrorCode::InvalidArgument, "Fock dimension must be positive");
    ComplexMatrix n = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

ComplexVector fock_ket(Eigen::Index dim, Eigen::Index n) {
    require(n >= 0 && n < dim, ErrorCode::TruncationTooSmall,
            "Fock state |" + std::to_string(n) + "> outside a truncation of dimension " + std::to_string(dim));
    ComplexVector psi = ComplexVector::Zero(dim);
    psi[n] = 1.0;
    return psi;
}

ComplexVector coherent_ket(Eigen::Index dim, Complex beta) {
    require(dim >= 1, ErrorCode::InvalidArgument, "Fock dimension must be positive");
    ComplexVector psi(dim);
    psi[0] = std::exp(-0.5 * std::norm(beta));
    for (Eigen::Index n = 1; n < dim; ++n) psi[n] = psi[n - 1] * beta / std::sqrt(static_cast<double>(n));
    return psi;
}

Complex coherent_overlap(Complex a, Complex b) {
    return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

ComplexMatrix ket_to_density(const ComplexVector& psi) { return psi * psi.adjoint(); }

ComplexMatrix thermal_state(Eigen::Index dim, double n_th) {
    require_nonnegative(n_th, "n_th");
    ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
    const double q = n_th / (n_th + 1.0);
    double p = 1.0, total = 0.0;
    for (Eigen::Index n = 0; n < dim; ++n) {
        rho(n, n) = p;
        total += p;
        p *= q;
    }
    return rho / total;
}

double fock_tail(const ComplexMatrix& rho, Eigen::Index levels) {
    const Eigen::Index dim = rho.rows();
    const double total = rho.diagonal().real().sum();
    double tail = 0.0;
    for (Eigen::Index n = std::max<Eigen::Index>(0, dim - levels); n < dim; ++n) tail += rho(n, n).real();
    return total > 0.0 ? tail / total : 0.0;
}

void check_fock_truncation(const ComplexMatrix& rho, const std::string& what) {
    const double tail = fock_tail(rho, 2);
    require(tail <= kTailTol, ErrorCode::TruncationTooSmall,
            what + " holds " + num(tail) + " of its population in the top two Fock levels of " +
                std::to_string(rho.rows()));
}

OpenSystem damped_ho(double omega, double gamma, double n_th, Eigen::Index fock_dim) {
    require(fock_dim >= 2, ErrorCode::InvalidArgument, "fock_dim must be at least 2");
    require(std::isfinite(omega), ErrorCode::InvalidArgument, "omega must be finite");
    require_nonnegative(gamma, "gamma");
    require_nonnegative(n_th, "n_th");
    const ComplexMatrix a = annihilation(fock_dim);
    std::vector<ComplexMatrix> jumps{std::sqrt(gamma * (n_th + 1.0)) * a};
    std::vector<std::string> labels{"a"};
    if (n_th > 0.0) {
        jumps.push_back(std::sqrt(gamma * n_th) * a.adjoint());
        labels.push_back("a_dag");
    }
    return OpenSystem(omega * number_operator(fock_dim), std::move(jumps), std::move(labels));
}

CoherentSuperpositionOracle CoherentSuperpositionOracle::balanced(Complex beta1, Complex beta2, double gamma,
                                                                  double omega) {
    CoherentSuperpositionOracle o;
    o.beta1 = beta1;
    o.beta2 = beta2;
    o.gamma = gamma;
    o.omega = omega;
    const double n2 = 2.0 + 2.0 * coherent_overlap(beta1, beta2).real();
    require(n2 > 1e-12, ErrorCode::InvalidArgument, "coherent amplitudes cancel");
    o.c1 = o.c2 = 1.0 / std::sqrt(n2);
    return o;
}

double CoherentSuperpositionOracle::norm() const {
    return std::norm(c1) + std::norm(c2) + 2.0 * (std::conj(c1) * c2 * coherent_overlap(beta1, beta2)).real();
}

ComplexVector CoherentSuperpositionOracle::initial_ket(Eigen::Index fock_dim) const {
    return c1 * coherent_ket(fock_dim, beta1) + c2 * coherent_ket(fock_dim, beta2);
}

Complex decayed_amplitude(Complex beta, double gamma, double omega, double t) {
    return beta * std::exp(Complex(-0.5 * gamma, -omega) * t);
}

ComplexMatrix zero_t_oracle(const CoherentSuperpositionOracle& o, double t, Eigen::Index fock_dim) {
    require(t >= 0.0 && std::isfinite(t), ErrorCode::InvalidArgument, "time must be non-negative");
    const double bmax = std::max(std::abs(o.beta1), std::abs(o.beta2));
    require(static_cast<double>(fock_dim) >= bmax * bmax + 6.0 * bmax, ErrorCode::TruncationTooSmall,
            "fock_dim " + std::to_string(fock_dim) + " too small for amplitude " + num(bmax));
    check_fock_truncation(ket_to_density(coherent_ket(fock_dim, bmax)), "largest coherent component");

    const ComplexVector k1 = coherent_ket(fock_dim, decayed_amplitude(o.beta1, o.gamma, o.omega, t));
    const ComplexVector k2 = coherent_ket(fock_dim, decayed_amplitude(o.beta2, o.gamma, o.omega, t));
    const Complex z = -0.5 * std::norm(o.beta1 - o.beta2) + Complex(0.0, (o.beta1 * std::conj(o.beta2)).imag());
    const Complex d = std::exp(z * (1.0 - std::exp(-o.gamma * t)));
    const Complex coh = o.c1 * std::conj(o.c2) * d;
    ComplexMatrix rho = std::norm(o.c1) * k1 * k1.adjoint() + std::norm(o.c2) * k2 * k2.adjoint();
    rho += coh * k1 * k2.adjoint();
    rho += std::conj(coh) * k2 * k1.adjoint();
    return rho;
}

// ---- Spatial grids ------------------------------------------------------

SpatialGrid make_grid(Eigen::Index points, double extent) {
    require(points >= 2, ErrorCode::InvalidArgument, "grid needs at least two points");
    require_positive(extent, "grid extent");
    SpatialGrid g;
    g.points = points;
    g.extent = extent;
    g.dx = extent / static_cast<double>(points);
    g.dp = 2.0 * kPi / extent;
    g.x.resize(points);
    g.p.resize(points);
    const double mid = 0.5 * static_cast<double>(points - 1);
    for (Eigen::Index k = 0; k < points; ++k) g.x[k] = (static_cast<double>(k) - mid) * g.dx;
    for (Eigen::Index m = 0; m < points; ++m) g.p[m] = static_cast<double>(m - points / 2) * g.dp;
    g.dft.resize(points, points);
    const double s = 1.0 / std::sqrt(static_cast<double>(points));
    for (Eigen::Index m = 0; m < points; ++m)
        for (Eigen::Index k = 0; k < points; ++k) g.dft(m, k) = std::polar(s, -g.p[m] * g.x[k]);
    return g;
}

ComplexVector gaussian_packet(const SpatialGrid& grid, double x0, double sigma_x, double k0) {
    require_positive(sigma_x, "sigma_x");
    const double nyquist = kPi / grid.dx;
    require(std::abs(k0) <= 0.5 * nyquist, ErrorCode::GridTooCoarse,
            "k0 = " + num(k0) + " exceeds half the Nyquist momentum " + num(nyquist));
    ComplexVector psi(grid.points);
    for (Eigen::Index k = 0; k < grid.points; ++k) {
        const double u = grid.x[k] - x0;
        psi[k] = std::polar(std::exp(-u * u / (4.0 * sigma_x * sigma_x)), k0 * grid.x[k]);
    }
    const double peak = psi.cwiseAbs2().maxCoeff();
    const double edge = std::max(std::norm(psi[0]), std::norm(psi[grid.points - 1]));
    require(edge <= kTailTol * peak, ErrorCode::TruncationTooSmall,
            "grid extent " + num(grid.extent) + " too small for a packet of width " + num(sigma_x));
    return psi / psi.norm();
}

ComplexVector gaussian_packet_momentum(const SpatialGrid& grid, double x0, double sigma_x, double k0) {
    const ComplexVector psi = grid.dft * gaussian_packet(grid, x0, sigma_x, k0);
    const Eigen::Index n = grid.points;
    const double peak = psi.cwiseAbs2().maxCoeff();
    const double edge = std::max(std::norm(psi[0]), std::norm(psi[n - 1]));
    require(edge <= kTailTol * peak, ErrorCode::GridTooCoarse, "momentum lattice too narrow for the packet");
    return psi / psi.norm();
}

double qbm_default_mass(double gamma, double lambda_th) {
    require_positive(gamma, "gamma");
    require_positive(lambda_th, "lambda_th");
    return 15.0 / (8.0 * kPi * gamma * lambda_th * lambda_th);
}

OpenSystem qbm_diffusion(double gamma, double lambda_th, Eigen::Index points, double extent, double mass) {
    require_nonnegative(gamma, "gamma");
    require_positive(lambda_th, "lambda_th");
    require_positive(mass, "mass");
    require(is_power_of_two(points), ErrorCode::InvalidArgument, "grid points must be a power of two");
    const SpatialGrid g = make_grid(points, extent);
    const RealVector kinetic = g.p.array().square() / (2.0 * mass);
    ComplexMatrix h = g.dft.adjoint() * kinetic.cast<Complex>().asDiagonal() * g.dft;
    h = hermitian_part(h);
    const double diffusion = 4.0 * kPi * gamma / (lambda_th * lambda_th);
    ComplexMatrix l = ComplexMatrix::Zero(points, points);
    l.diagonal() = (std::sqrt(2.0 * diffusion) * g.x).cast<Complex>();
    return OpenSystem(std::move(h), {std::move(l)}, {"x"});
}

KickStencil kick_stencil(double gamma, double sigma_g, Eigen::Index points, double extent, int n_kicks) {
    require_nonnegative(gamma, "gamma");
    require_positive(sigma_g, "sigma_g");
    require(n_kicks >= 1 && n_kicks % 2 == 1, ErrorCode::InvalidArgument, "n_kicks must be odd and positive");
    const double dp = 2.0 * kPi / extent;
    require(sigma_g / dp >= 3.0, ErrorCode::IncommensurateKick,
            "sigma_g spans " + num(sigma_g / dp) + " lattice momenta, need at least 3");
    KickStencil s;
    const int half = (n_kicks - 1) / 2;
    int step = 1;
    if (half > 0) step = std::max(1, static_cast<int>(std::lround(4.0 * sigma_g / half / dp)));
    require(static_cast<Eigen::Index>(half) * step < points / 2, ErrorCode::IncommensurateKick,
            "kick stencil wider than the momentum lattice");
    double total = 0.0;
    for (int i = -half; i <= half; ++i) {
        const double q = i * step * dp;
        s.lattice_shifts.push_back(i * step);
        s.q.push_back(q);
        const double w = std::exp(-0.5 * q * q / (sigma_g * sigma_g));
        s.rates.push_back(w);
        total += w;
    }
    for (double& r : s.rates) r *= gamma / total;
    return s;
}

double colldec_default_mass(double gamma, double sigma_g) {
    require_positive(gamma, "gamma");
    require_positive(sigma_g, "sigma_g");
    return 2.0 * sigma_g * sigma_g / gamma;
}

OpenSystem collisional_decoherence(double gamma, double sigma_g, Eigen::Index points, double extent, int n_kicks,
                                   double mass) {
    require_positive(mass, "mass");
    require(points >= 2 && points % 2 == 0, ErrorCode::InvalidArgument, "grid points must be even");
    const KickStencil st = kick_stencil(gamma, sigma_g, points, extent, n_kicks);
    const SpatialGrid g = make_grid(points, extent);
    ComplexMatrix h = ComplexMatrix::Zero(points, points);
    h.diagonal() = (g.p.array().square() / (2.0 * mass)).matrix().cast<Complex>();
    std::vector<ComplexMatrix> jumps;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < st.q.size(); ++i) {
        // e^{iqx}|p_m> = |p_{m+s}>; wrapping around the lattice picks up (-1)^(N-1) = -1.
        ComplexMatrix l = ComplexMatrix::Zero(points, points);
        const double amp = std::sqrt(st.rates[i]);
        for (Eigen::Index m = 0; m < points; ++m) {
            Eigen::Index target = m + st.lattice_shifts[i];
            double sign = 1.0;
            if (target >= points) {
                target -= points;
                sign = -1.0;
            } else if (target < 0) {
                target += points;
                sign = -1.0;
            }
            l(target, m) = amp * sign;
        }
        jumps.push_back(std::move(l));
        labels.push_back("q" + std::to_string(st.lattice_shifts[i]));
    }
    return OpenSystem(std::move(h), std::move(jumps), std::move(labels));
}

// ---- Cavity measurement with feedback -----------------------------------

double plus_overlap(int k, int n, int d) {
    require(d >= 1, ErrorCode::InvalidArgument, "d must be positive");
    const int m = n - k;
    if (std::abs(m) == d) return 0.0;
    return std::cos(kPi * m / (2.0 * d));
}

Complex minus_overlap(int k, int n, int d) {
    require(d >= 1, ErrorCode::InvalidArgument, "d must be positive");
    const int m = n - k;
    if (m == 0) return 0.0;
    return Complex(0.0, std::sin(kPi * m / (2.0 * d)));
}

OpenSystem measurement_feedback(int d, const std::vector<int>& bases, double gamma, double omega,
                                Eigen::Index fock_dim) {
    require(d >= 1, ErrorCode::InvalidArgument, "d must be positive");
    require(!bases.empty(), ErrorCode::InvalidArgument, "at least one measurement basis needed");
    require_nonnegative(gamma, "gamma");
    require(std::isfinite(omega), ErrorCode::InvalidArgument, "omega must be finite");
    require(fock_dim >= d + 2, ErrorCode::TruncationTooSmall,
            "fock_dim must be at least d + 2 = " + std::to_string(d + 2));
    std::vector<int> seen;
    for (int k : bases) {
        require(k >= 0 && k <= d, ErrorCode::InvalidArgument, "basis index " + std::to_string(k) + " outside 0..d");
        require(std::find(seen.begin(), seen.end(), k) == seen.end(), ErrorCode::InvalidArgument,
                "duplicate basis index");
        seen.push_back(k);
    }
    const double scale = std::sqrt(gamma / static_cast<double>(bases.size()));
    std::vector<ComplexMatrix> jumps;
    std::vector<std::string> labels;
    for (int k : bases) {
        ComplexMatrix plus = ComplexMatrix::Zero(fock_dim, fock_dim);
        ComplexMatrix minus = ComplexMatrix::Zero(fock_dim, fock_dim);
        for (int n = 0; n <= d; ++n) {
            const int row = k == 0 ? n + 1 : n;
            plus(row, n) = scale * plus_overlap(k, n, d);
            minus(n, n) = scale * minus_overlap(k, n, d);
        }
        jumps.push_back(std::move(plus));
        labels.push_back("+," + std::to_string(k));
        jumps.push_back(std::move(minus));
        labels.push_back("-," + std::to_string(k));
    }
    return OpenSystem(omega * number_operator(fock_dim), std::move(jumps), std::move(labels));
}

OpenSystem two_level(double gamma_down, double gamma_up, double omega) {
    require_nonnegative(gamma_down, "gamma_down");
    require_nonnegative(gamma_up, "gamma_up");
    require(std::isfinite(omega), ErrorCode::InvalidArgument, "omega must be finite");
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h(0, 0) = -0.5 * omega;
    h(1, 1) = 0.5 * omega;
    ComplexMatrix lower = ComplexMatrix::Zero(2, 2);
    lower(0, 1) = std::sqrt(gamma_down);
    std::vector<ComplexMatrix> jumps{lower};
    std::vector<std::string> labels{"sigma_minus"};
    if (gamma_up > 0.0) {
        ComplexMatrix raise = ComplexMatrix::Zero(2, 2);
        raise(1, 0) = std::sqrt(gamma_up);
        jumps.push_back(raise);
        labels.push_back("sigma_plus");
    }
    return OpenSystem(std::move(h), std::move(jumps), std::move(labels));
}

// ---- Catalog ------------------------------------------------------------

const std::vector<ModelInfo>& model_catalog() {
    static const std::vector<ModelInfo> catalog = {
        {"damped_ho",
         "damped harmonic oscillator coupled to a thermal bath",
         "1/gamma",
         true,
         {{"omega", "number", 2.0, "oscillator frequency"},
          {"gamma", "number", 1.0, "damping rate"},
          {"n_th", "number", 0.0, "thermal occupation of the bath"},
          {"fock_dim", "integer", 40, "Fock space truncation"}}},
        {"qbm",
         "quantum Brownian motion in the high-temperature limit, position basis",
         "1/gamma",
         true,
         {{"gamma", "number", 1.0, "relaxation rate"},
          {"lambda_th", "number", 1.0, "thermal de Broglie wavelength (length unit)"},
          {"points", "integer", 256, "grid points (power of two)"},
          {"extent", "number", 40.0, "grid length"},
          {"mass", "number", nullptr, "particle mass; null gives 15 / (8 pi gamma lambda_th^2)"}}},
        {"colldec",
         "collisional decoherence by Gaussian momentum kicks, momentum basis",
         "1/gamma",
         true,
         {{"gamma", "number", 1.0, "collision rate"},
          {"sigma_g", "number", 1.0, "width of the kick distribution (momentum unit)"},
          {"points", "integer", 384, "momentum lattice sites"},
          {"extent", "number", 24.0 * kPi, "position period; lattice spacing is 2 pi / extent"},
          {"kicks", "integer", 17, "odd number of discrete kicks over +-4 sigma_g"},
          {"mass", "number", nullptr, "particle mass; null gives 2 sigma_g^2 / gamma"}}},
        {"measure_fb",
         "cavity under repeated photon-number measurement with feedback",
         "1/gamma",
         true,
         {{"d", "integer", 19, "number of measurement angles"},
          {"bases", "integer_list", nlohmann::json::array({0, 10}), "measurement bases k"},
          {"gamma", "number", 1.0, "total measurement rate"},
          {"omega", "number", 0.5, "cavity frequency"},
          {"fock_dim", "integer", 22, "Fock space truncation (at least d + 2)"}}},
        {"two_level",
         "two-level system with decay and excitation (test model)",
         "1/gamma_down",
         false,
         {{"gamma_down", "number", 1.0, "decay rate"},
          {"gamma_up", "number", 0.0, "excitation rate"},
          {"omega", "number", 0.0, "level splitting"}}},
    };
    return catalog;
}

const ModelInfo& find_model(const std::string& name) {
    for (const auto& m : model_catalog())
        if (m.name == name) return m;
    fail(ErrorCode::Config, "unknown model '" + name + "'");
}

namespace {

nlohmann::json resolve_params(const ModelInfo& info, const nlohmann::json& given) {
    require(given.is_null() || given.is_object(), ErrorCode::Config, "model parameters must be an object");
    nlohmann::json out = nlohmann::json::object();
    for (const auto& p : info.params) out[p.name] = p.default_value;
    if (given.is_object()) {
        for (auto it = given.begin(); it != given.end(); ++it) {
            const auto spec = std::find_if(info.params.begin(), info.params.end(),
                                           [&](const ModelParam& p) { return p.name == it.key(); });
            require(spec != info.params.end(), ErrorCode::Config,
                    "model '" + info.name + "' has no parameter '" + it.key() + "'");
            const auto& v = it.value();
            bool ok = v.is_null() && spec->default_value.is_null();
            if (spec->type == "number") ok = ok || v.is_number();
            if (spec->type == "integer") ok = v.is_number_integer();
            if (spec->type == "integer_list") {
                ok = v.is_array();
                for (const auto& e : v) ok = ok && e.is_number_integer();
            }
            require(ok, ErrorCode::Config, "parameter '" + it.key() + "' must be of type " + spec->type);
            out[it.key()] = v;
        }
    }
    return out;
}

}  // namespace

BuiltModel build_model(const std::string& name, const nlohmann::json& params) {
    const ModelInfo& info = find_model(name);
    nlohmann::json p = resolve_params(info, params);
    if (name == "damped_ho") {
        OpenSystem sys = damped_ho(p["omega"].get<double>(), p["gamma"].get<double>(), p["n_th"].get<double>(),
                                   p["fock_dim"].get<Eigen::Index>());
        return {name, std::move(sys), p, std::nullopt};
    }
    if (name == "qbm") {
        const double gamma = p["gamma"].get<double>(), lambda = p["lambda_th"].get<double>();
        if (p["mass"].is_null()) p["mass"] = qbm_default_mass(gamma, lambda);
        const auto points = p["points"].get<Eigen::Index>();
        const double extent = p["extent"].get<double>();
        OpenSystem sys = qbm_diffusion(gamma, lambda, points, extent, p["mass"].get<double>());
        return {name, std::move(sys), p, make_grid(points, extent)};
    }
    if (name == "colldec") {
        const double gamma = p["gamma"].get<double>(), sigma = p["sigma_g"].get<double>();
        if (p["mass"].is_null()) p["mass"] = colldec_default_mass(gamma, sigma);
        const auto points = p["points"].get<Eigen::Index>();
        const double extent = p["extent"].get<double>();
        OpenSystem sys =
            collisional_decoherence(gamma, sigma, points, extent, p["kicks"].get<int>(), p["mass"].get<double>());
        return {name, std::move(sys), p, make_grid(points, extent)};
    }
    if (name == "measure_fb") {
        OpenSystem sys = measurement_feedback(p["d"].get<int>(), p["bases"].get<std::vector<int>>(),
                                              p["gamma"].get<double>(), p["omega"].get<double>(),
                                              p["fock_dim"].get<Eigen::Index>());
        return {name, std::move(sys), p, std::nullopt};
    }
    OpenSystem sys = two_level(p["gamma_down"].get<double>(), p["gamma_up"].get<double>(), p["omega"].get<double>());
    return {name, std::move(sys), p, std::nullopt};
}

nlohmann::json catalog_json(bool include_auxiliary) {
    nlohmann::json models = nlohmann::json::array();
    for (const auto& m : model_catalog()) {
        if (!m.benchmark && !include_auxiliary) continue;
        nlohmann::json params = nlohmann::json::array();
        for (const auto& p : m.params)
            params.push_back({{"name", p.name}, {"type", p.type}, {"default", p.default_value}, {"doc", p.doc}});
        models.push_back({{"name", m.name},
                          {"summary", m.summary},
                          {"time_unit", m.time_unit},
                          {"benchmark", m.benchmark},
                          {"parameters", params}});
    }
    return {{"models", models}};
}

std::string catalog_text(bool include_auxiliary) {
    std::ostringstream os;
    for (const auto& m : model_catalog()) {
        if (!m.benchmark && !include_auxiliary) continue;
        os << m.name << ": " << m.summary << " (time unit " << m.time_unit << ")\n";
        for (const auto& p : m.params)
            os << "    " << p.name << " (" << p.type << ", default " << p.default_value.dump() << "): " << p.doc
               << '\n';
    }
    return os.str();
}

}  // namespace qjump
