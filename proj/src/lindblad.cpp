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

#include "qjump/lindblad.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qjump/errors.hpp"

namespace qjump {

namespace {

constexpr Complex kI(0.0, 1.0);

}  // namespace

OpenSystem::OpenSystem(ComplexMatrix hamiltonian, std::vector<ComplexMatrix> jump_ops,
                       std::vector<std::string> labels) {
    check_hermitian(hamiltonian, "hamiltonian");
    require(hamiltonian.rows() > 0, ErrorCode::DimensionMismatch, "empty hamiltonian");
    require(!jump_ops.empty(), ErrorCode::InvalidArgument, "jump operator list is empty");
    const Eigen::Index n = hamiltonian.rows();
    if (labels.empty()) {
        for (std::size_t j = 0; j < jump_ops.size(); ++j) labels.push_back("L" + std::to_string(j));
    }
    require(labels.size() == jump_ops.size(), ErrorCode::DimensionMismatch,
            "label count does not match jump operator count");

    auto data = std::make_shared<Data>();
    ComplexMatrix total = ComplexMatrix::Zero(n, n);
    for (std::size_t j = 0; j < jump_ops.size(); ++j) {
        const ComplexMatrix& l = jump_ops[j];
        require(l.rows() == n && l.cols() == n, ErrorCode::DimensionMismatch,
                "jump operator " + std::to_string(j) + " has wrong shape");
        require(all_finite(l), ErrorCode::NonFinite,
                "jump operator " + std::to_string(j) + " has non-finite entries");
        ComplexMatrix rate = l.adjoint() * l;
        total += rate;
        data->jump_traces.push_back(l.trace());
        data->rates.emplace_back(std::move(rate));
        data->jumps.emplace_back(l);
    }
    ComplexMatrix effective = hamiltonian - 0.5 * kI * total;
    data->hamiltonian = LinearOperator(std::move(hamiltonian));
    data->total_rate = LinearOperator(std::move(total));
    data->effective = LinearOperator(std::move(effective));
    data->labels = std::move(labels);
    data_ = std::move(data);
}

const std::string& OpenSystem::label(std::size_t j) const {
    require(j < num_jumps(), ErrorCode::IndexOutOfRange, "jump index " + std::to_string(j));
    return data_->labels[j];
}

const LinearOperator& OpenSystem::jump_op(std::size_t j) const {
    require(j < num_jumps(), ErrorCode::IndexOutOfRange, "jump index " + std::to_string(j));
    return data_->jumps[j];
}

const LinearOperator& OpenSystem::rate_op(std::size_t j) const {
    require(j < num_jumps(), ErrorCode::IndexOutOfRange, "jump index " + std::to_string(j));
    return data_->rates[j];
}

bool ShiftVector::is_zero() const {
    for (const auto& a : alphas)
        if (a != Complex(0.0)) return false;
    return true;
}

double ShiftVector::squared_norm() const {
    double s = 0.0;
    for (const auto& a : alphas) s += std::norm(a);
    return s;
}

void check_shift(const OpenSystem& sys, const ShiftVector& alpha) {
    require(alpha.size() == sys.num_jumps(), ErrorCode::DimensionMismatch,
            "shift vector has length " + std::to_string(alpha.size()) + ", expected " +
                std::to_string(sys.num_jumps()));
}

void check_state_dim(const OpenSystem& sys, const ComplexMatrix& rho) {
    require(rho.rows() == sys.dim() && rho.cols() == sys.dim(), ErrorCode::DimensionMismatch,
            "state is " + std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()) +
                ", system dim " + std::to_string(sys.dim()));
}

ComplexMatrix apply_generator(const OpenSystem& sys, const ComplexMatrix& rho) {
    check_state_dim(sys, rho);
    // -i(H rho - rho H) - (Gamma rho + rho Gamma)/2 == -i(Heff rho - rho Heff^+)
    const ComplexMatrix y = sys.effective_op().apply(rho);
    const ComplexMatrix rho_d = rho.adjoint();
    const ComplexMatrix z = sys.effective_op().apply(rho_d).adjoint();
    ComplexMatrix out = -kI * (y - z);
    for (std::size_t j = 0; j < sys.num_jumps(); ++j) sys.jump_op(j).sandwich_add(rho, out);
    return out;
}

ComplexMatrix shifted_jump(const OpenSystem& sys, const ShiftVector& alpha, std::size_t j) {
    check_shift(sys, alpha);
    ComplexMatrix l = sys.jump(j);
    l.diagonal().array() += alpha[j];
    return l;
}

ComplexMatrix shifted_hamiltonian(const OpenSystem& sys, const ShiftVector& alpha) {
    check_shift(sys, alpha);
    ComplexMatrix h = sys.hamiltonian();
    for (std::size_t j = 0; j < sys.num_jumps(); ++j) {
        if (alpha[j] == Complex(0.0)) continue;
        const ComplexMatrix& l = sys.jump(j);
        h -= 0.5 * kI * (std::conj(alpha[j]) * l - alpha[j] * l.adjoint());
    }
    return h;
}

EffectiveHamiltonian effective_hamiltonian(const OpenSystem& sys, const ShiftVector& alpha) {
    const ComplexMatrix h = shifted_hamiltonian(sys, alpha);
    ComplexMatrix gamma = ComplexMatrix::Zero(sys.dim(), sys.dim());
    for (std::size_t j = 0; j < sys.num_jumps(); ++j) {
        const ComplexMatrix l = shifted_jump(sys, alpha, j);
        gamma.noalias() += l.adjoint() * l;
    }
    return {h - 0.5 * kI * gamma};
}

ComplexMatrix apply_jump(const OpenSystem& sys, const ShiftVector& alpha, std::size_t j,
                         const ComplexMatrix& rho) {
    check_shift(sys, alpha);
    check_state_dim(sys, rho);
    const LinearOperator& l = sys.jump_op(j);
    const Complex a = alpha[j];
    if (a == Complex(0.0)) return l.sandwich(rho);
    ComplexMatrix lr = l.apply(rho);
    lr += a * rho;
    const ComplexMatrix lr_d = lr.adjoint();
    ComplexMatrix out = l.apply(lr_d);
    out += a * lr_d;
    return out.adjoint();
}

ComplexMatrix apply_deterministic(const OpenSystem& sys, const ShiftVector& alpha,
                                  const ComplexMatrix& rho) {
    check_shift(sys, alpha);
    check_state_dim(sys, rho);
    // Heff_alpha = Heff_0 - i sum_j alpha_j^* L_j - (i/2) sum_j |alpha_j|^2
    auto heff_apply = [&](const ComplexMatrix& x) {
        ComplexMatrix y = sys.effective_op().apply(x);
        for (std::size_t j = 0; j < sys.num_jumps(); ++j)
            if (alpha[j] != Complex(0.0)) sys.jump_op(j).apply_add(x, -kI * std::conj(alpha[j]), y);
        y -= 0.5 * kI * alpha.squared_norm() * x;
        return y;
    };
    const ComplexMatrix y = heff_apply(rho);
    const ComplexMatrix z = heff_apply(rho.adjoint()).adjoint();
    return -kI * (y - z);
}

double partial_jump_rate(const OpenSystem& sys, const ShiftVector& alpha, std::size_t j,
                         const ComplexMatrix& rho) {
    check_shift(sys, alpha);
    check_state_dim(sys, rho);
    const Complex a = alpha[j];
    double rate = sys.rate_op(j).trace_with(rho).real() + std::norm(a) * rho.trace().real();
    if (a != Complex(0.0)) rate += 2.0 * (std::conj(a) * sys.jump_op(j).trace_with(rho)).real();
    return rate;
}

double total_jump_rate(const OpenSystem& sys, const ShiftVector& alpha, const ComplexMatrix& rho) {
    double total = 0.0;
    for (std::size_t j = 0; j < sys.num_jumps(); ++j) total += partial_jump_rate(sys, alpha, j, rho);
    return total;
}

Complex optimal_shift(const OpenSystem& sys, std::size_t j, const ComplexMatrix& rho) {
    check_state_dim(sys, rho);
    const double tr = rho.trace().real();
    require(tr > kTraceEpsilon, ErrorCode::VanishingWeight,
            "state trace " + std::to_string(tr) + " too small for a shift");
    return -sys.jump_op(j).trace_with(rho) / tr;
}

ShiftVector optimal_shifts(const OpenSystem& sys, const ComplexMatrix& rho) {
    ShiftVector alpha = ShiftVector::zero(sys.num_jumps());
    for (std::size_t j = 0; j < sys.num_jumps(); ++j) alpha[j] = optimal_shift(sys, j, rho);
    return alpha;
}

double minimal_rate(const OpenSystem& sys, std::size_t j, const ComplexMatrix& rho) {
    check_state_dim(sys, rho);
    const double tr = rho.trace().real();
    require(tr > kTraceEpsilon, ErrorCode::VanishingWeight,
            "state trace " + std::to_string(tr) + " too small for a shift");
    const Complex lt = sys.jump_op(j).trace_with(rho);
    return sys.rate_op(j).trace_with(rho).real() - std::norm(lt) / tr;
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            entries.push_back({m(r, c).real(), m(r, c).imag()});
    return entries;
}

ComplexMatrix matrix_from_json(const nlohmann::json& j, Eigen::Index dim) {
    require(j.is_array() && static_cast<Eigen::Index>(j.size()) == dim * dim, ErrorCode::Config,
            "matrix must be an array of dim*dim [re, im] pairs");
    ComplexMatrix m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            const auto& e = j[static_cast<std::size_t>(r * dim + c)];
            require(e.is_array() && e.size() == 2, ErrorCode::Config, "matrix entry must be [re, im]");
            m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

nlohmann::json to_json(const OpenSystem& sys) {
    nlohmann::json doc;
    doc["format"] = "qjump.open_system";
    doc["version"] = 1;
    doc["dim"] = sys.dim();
    doc["hamiltonian"] = matrix_to_json(sys.hamiltonian());
    doc["jump_operators"] = nlohmann::json::array();
    for (std::size_t j = 0; j < sys.num_jumps(); ++j)
        doc["jump_operators"].push_back({{"label", sys.label(j)}, {"matrix", matrix_to_json(sys.jump(j))}});
    return doc;
}

OpenSystem open_system_from_json(const nlohmann::json& doc) {
    try {
        const Eigen::Index dim = doc.at("dim").get<Eigen::Index>();
        require(dim > 0, ErrorCode::Config, "dim must be positive");
        ComplexMatrix h = matrix_from_json(doc.at("hamiltonian"), dim);
        std::vector<ComplexMatrix> ls;
        std::vector<std::string> labels;
        for (const auto& entry : doc.at("jump_operators")) {
            ls.push_back(matrix_from_json(entry.at("matrix"), dim));
            labels.push_back(entry.value("label", "L" + std::to_string(labels.size())));
        }
        return OpenSystem(std::move(h), std::move(ls), std::move(labels));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Config, std::string("malformed system document: ") + e.what());
    }
}

void save_open_system(const OpenSystem& sys, const std::string& path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path);
    out << to_json(sys).dump(1) << '\n';
}

OpenSystem load_open_system(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Config, std::string("cannot parse ") + path + ": " + e.what());
    }
    return open_system_from_json(doc);
}

}  // namespace qjump
