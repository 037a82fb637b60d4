// Copyright 2026 The qafem Authors.
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include "qafem/material.hpp"

#include <array>
#include <cmath>

#include "qafem/errors.hpp"

namespace qafem {

ElasticParams ElasticParams::from_young_poisson(double young, double poisson) {
    if (!(young > 0.0)) throw InvalidArgumentError("Young's modulus must be positive");
    if (!(poisson >= 0.0 && poisson < 0.5)) throw InvalidArgumentError("Poisson ratio must lie in [0, 0.5)");
    ElasticParams p;
    p.young = young;
    p.poisson = poisson;
    p.bulk = young / (3.0 * (1.0 - 2.0 * poisson));
    p.shear = young / (2.0 * (1.0 + poisson));
    return p;
}

HardeningLaw::HardeningLaw(double yield, std::variant<LinearHardening, SwiftHardening> law)
    : yield_(yield), law_(law) {}

HardeningLaw HardeningLaw::linear(double yield_stress, double modulus) {
    if (!(yield_stress > 0.0)) throw InvalidArgumentError("yield stress must be positive");
    if (!(modulus >= 0.0)) throw InvalidArgumentError("hardening modulus must be non-negative");
    return HardeningLaw(yield_stress, LinearHardening{modulus});
}

HardeningLaw HardeningLaw::swift(double yield_stress, double gamma0, double exponent) {
    if (!(yield_stress > 0.0)) throw InvalidArgumentError("yield stress must be positive");
    if (!(gamma0 > 0.0)) throw InvalidArgumentError("Swift gamma0 must be positive");
    if (!(exponent > 0.0)) throw InvalidArgumentError("Swift exponent must be positive");
    return HardeningLaw(yield_stress, SwiftHardening{gamma0, exponent});
}

double HardeningLaw::hardening(double gamma) const {
    if (const auto* lin = std::get_if<LinearHardening>(&law_)) return lin->modulus * gamma;
    const auto& sw = std::get<SwiftHardening>(law_);
    return yield_ * (std::pow(1.0 + gamma / sw.gamma0, sw.exponent) - 1.0);
}

double HardeningLaw::hardening_slope(double gamma) const {
    if (const auto* lin = std::get_if<LinearHardening>(&law_)) return lin->modulus;
    const auto& sw = std::get<SwiftHardening>(law_);
    return yield_ * sw.exponent / sw.gamma0 * std::pow(1.0 + gamma / sw.gamma0, sw.exponent - 1.0);
}

double HardeningLaw::energy(double gamma) const {
    if (const auto* lin = std::get_if<LinearHardening>(&law_)) {
        return yield_ * gamma + 0.5 * lin->modulus * gamma * gamma;
    }
    const auto& sw = std::get<SwiftHardening>(law_);
    const double np1 = sw.exponent + 1.0;
    return yield_ * sw.gamma0 / np1 * (std::pow(1.0 + gamma / sw.gamma0, np1) - 1.0);
}

// ---------------------------------------------------------------------------
// Normal parameterisation

namespace {

Eigen::Matrix3d make_basis(std::initializer_list<std::array<double, 3>> rows) {
    Eigen::Matrix3d m;
    int i = 0;
    for (const auto& r : rows) {
        m.row(i++) << r[0], r[1], r[2];
    }
    return m;
}

const std::array<Eigen::Matrix3d, 3>& basis_2d() {
    static const double s = 1.0 / std::sqrt(2.0);
    static const std::array<Eigen::Matrix3d, 3> b = {
        make_basis({{1, 0, 0}, {0, 0, 0}, {0, 0, -1}}),
        make_basis({{0, 0, 0}, {0, 1, 0}, {0, 0, -1}}),
        make_basis({{0, s, 0}, {s, 0, 0}, {0, 0, 0}}),
    };
    return b;
}

void check_dimension(int dimension) {
    if (dimension != 1 && dimension != 2) {
        throw ContractError("dimension must be 1 or 2, got " + std::to_string(dimension));
    }
}

}  // namespace

int alpha_size(int dimension) {
    check_dimension(dimension);
    return dimension == 1 ? 2 : 3;
}

Eigen::MatrixXd constraint_matrix(int dimension) {
    const int n = alpha_size(dimension);
    Eigen::MatrixXd m(n, n);
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) m(k, l) = (normal_basis(dimension, k).array() * normal_basis(dimension, l).array()).sum();
    }
    return m;
}

const Eigen::Matrix3d& normal_basis(int dimension, int k) {
    if (k < 0 || k >= alpha_size(dimension)) throw ContractError("normal basis index out of range");
    return basis_2d()[static_cast<std::size_t>(k)];
}

Eigen::Matrix3d plastic_normal(const Eigen::VectorXd& alpha) {
    if (alpha.size() != 2 && alpha.size() != 3) throw ContractError("normal parameters must have 2 or 3 entries");
    Eigen::Matrix3d n = Eigen::Matrix3d::Zero();
    for (Eigen::Index k = 0; k < alpha.size(); ++k) n += alpha(k) * basis_2d()[static_cast<std::size_t>(k)];
    return n;
}

Eigen::VectorXd default_alpha(int dimension) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(alpha_size(dimension));
    a(0) = 1.0;
    a(1) = -0.5;
    return a;
}

Eigen::VectorXd alpha_from_normal(const Eigen::Matrix3d& normal, int dimension) {
    const int n = alpha_size(dimension);
    Eigen::VectorXd rhs(n);
    for (int k = 0; k < n; ++k) rhs(k) = (normal.array() * normal_basis(dimension, k).array()).sum();
    return constraint_matrix(dimension).ldlt().solve(rhs);
}

// ---------------------------------------------------------------------------
// Tensors

Eigen::Matrix3d embed(const Eigen::VectorXd& flat, int dimension) {
    check_dimension(dimension);
    if (flat.size() != dimension * dimension) throw ContractError("flattened tensor has the wrong size");
    Eigen::Matrix3d t = Eigen::Matrix3d::Zero();
    for (int i = 0; i < dimension; ++i) {
        for (int j = 0; j < dimension; ++j) t(i, j) = flat(i * dimension + j);
    }
    return t;
}

Eigen::VectorXd flatten(const Eigen::Matrix3d& tensor, int dimension) {
    check_dimension(dimension);
    Eigen::VectorXd flat(dimension * dimension);
    for (int i = 0; i < dimension; ++i) {
        for (int j = 0; j < dimension; ++j) flat(i * dimension + j) = tensor(i, j);
    }
    return flat;
}

Eigen::Matrix3d deviator(const Eigen::Matrix3d& tensor) {
    return tensor - tensor.trace() / 3.0 * Eigen::Matrix3d::Identity();
}

double von_mises(const Eigen::Matrix3d& stress) {
    const Eigen::Matrix3d s = deviator(stress);
    return std::sqrt(1.5 * (s.array() * s.array()).sum());
}

Eigen::VectorXd predictor_alpha(const Eigen::Matrix3d& strain, const PointState& state, int dimension) {
    const Eigen::Matrix3d e = deviator(strain) - state.plastic_strain;
    const double norm = e.norm();
    if (!(norm > 1e-14 * (1.0 + strain.norm()))) return {};
    return alpha_from_normal(std::sqrt(1.5) / norm * e, dimension);
}

// ---------------------------------------------------------------------------
// Energies

double elastic_energy(const Eigen::Matrix3d& strain, const Eigen::Matrix3d& plastic_strain,
                      const ElasticParams& params) {
    const double tr = strain.trace();
    const Eigen::Matrix3d e = deviator(strain) - plastic_strain;
    return 0.5 * params.bulk * tr * tr + params.shear * (e.array() * e.array()).sum();
}

double elastic_energy(const Eigen::VectorXd& strain, int dimension, const ElasticParams& params) {
    return elastic_energy(embed(strain, dimension), Eigen::Matrix3d::Zero(), params);
}

double j2_energy_increment(const Eigen::Matrix3d& strain, const PointState& state, const LocalUnknowns& unknowns,
                           const Material& material) {
    if (unknowns.dgamma < 0.0) throw DomainError("plastic multiplier increment must be non-negative");
    const Eigen::Matrix3d eps_p = state.plastic_strain + unknowns.dgamma * plastic_normal(unknowns.alpha);
    const auto& h = material.hardening;
    return elastic_energy(strain, eps_p, material.elastic) -
           elastic_energy(state.strain, state.plastic_strain, material.elastic) +
           h.energy(state.gamma + unknowns.dgamma) - h.energy(state.gamma);
}

double normal_penalty(const Eigen::VectorXd& alpha, double factor) {
    const int d = alpha.size() == 2 ? 1 : 2;
    const double r = alpha.dot(constraint_matrix(d) * alpha) - 1.5;
    return factor * r * r;
}

LocalFunctional augmented_local_functional(const Eigen::Matrix3d& strain, const PointState& state,
                                           const LocalUnknowns& unknowns, const Material& material) {
    const auto& alpha = unknowns.alpha;
    const int d = alpha.size() == 2 ? 1 : 2;
    const int na = static_cast<int>(alpha.size());
    const double mu = material.elastic.shear;
    const double c = material.penalty_factor();
    const double dg = unknowns.dgamma;

    const Eigen::MatrixXd M = constraint_matrix(d);
    const Eigen::Matrix3d N = plastic_normal(alpha);
    const Eigen::Matrix3d e = deviator(strain) - state.plastic_strain;
    const Eigen::Matrix3d P = e - dg * N;
    const Eigen::VectorXd Ma = M * alpha;
    const double r = alpha.dot(Ma) - 1.5;
    const auto& h = material.hardening;
    const double gamma = state.gamma + dg;

    LocalFunctional out;
    out.value = j2_energy_increment(strain, state, unknowns, material) + c * r * r;
    out.gradient.resize(1 + na);
    out.hessian.resize(1 + na, 1 + na);

    auto dot = [](const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) { return (a.array() * b.array()).sum(); };
    out.gradient(0) = -2.0 * mu * dot(P, N) + h.yield_stress() + h.hardening(gamma);
    out.hessian(0, 0) = 2.0 * mu * dot(N, N) + h.hardening_slope(gamma);
    for (int k = 0; k < na; ++k) {
        const Eigen::Matrix3d& Gk = normal_basis(d, k);
        out.gradient(1 + k) = -2.0 * mu * dg * dot(P, Gk) + 4.0 * c * r * Ma(k);
        const double cross = -2.0 * mu * dot(e, Gk) + 4.0 * mu * dg * dot(N, Gk);
        out.hessian(0, 1 + k) = cross;
        out.hessian(1 + k, 0) = cross;
        for (int l = 0; l < na; ++l) {
            out.hessian(1 + k, 1 + l) = 2.0 * mu * dg * dg * M(k, l) + c * (8.0 * Ma(k) * Ma(l) + 4.0 * r * M(k, l));
        }
    }
    return out;
}

Eigen::Matrix3d stress_tensor(const Eigen::Matrix3d& strain, const PointState& state, const LocalUnknowns& unknowns,
                              const ElasticParams& params) {
    const Eigen::Matrix3d eps_p = state.plastic_strain + unknowns.dgamma * plastic_normal(unknowns.alpha);
    return params.bulk * strain.trace() * Eigen::Matrix3d::Identity() +
           2.0 * params.shear * (deviator(strain) - eps_p);
}

Eigen::MatrixXd elastic_tangent(const ElasticParams& params, int dimension) {
    check_dimension(dimension);
    const int d = dimension;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d * d, d * d);
    auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            for (int k = 0; k < d; ++k) {
                for (int l = 0; l < d; ++l) {
                    const double sym = 0.5 * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k));
                    const double vol = delta(i, j) * delta(k, l);
                    C(i * d + j, k * d + l) = params.bulk * vol + 2.0 * params.shear * (sym - vol / 3.0);
                }
            }
        }
    }
    return C;
}

StressTangent stress_and_tangent(const Eigen::Matrix3d& strain, const PointState& state,
                                 const LocalUnknowns& unknowns, const ElasticParams& params, int dimension) {
    return {flatten(stress_tensor(strain, state, unknowns, params), dimension), elastic_tangent(params, dimension)};
}

PointState commit_state(const PointState& state, const LocalUnknowns& unknowns, const Eigen::Matrix3d& strain) {
    PointState next;
    next.plastic_strain = state.plastic_strain + unknowns.dgamma * plastic_normal(unknowns.alpha);
    next.gamma = state.gamma + unknowns.dgamma;
    next.strain = strain;
    next.alpha = unknowns.dgamma > 0.0 ? unknowns.alpha : state.alpha;
    return next;
}

}  // namespace qafem
