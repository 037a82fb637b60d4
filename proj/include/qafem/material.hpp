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

#pragma once

#include <variant>

#include <Eigen/Dense>

namespace qafem {

/// Isotropic linear elastic constants. Stresses in MPa.
struct ElasticParams {
    double young = 0.0;
    double poisson = 0.0;
    double bulk = 0.0;   // K
    double shear = 0.0;  // mu

    static ElasticParams from_young_poisson(double young, double poisson);
};

struct LinearHardening {
    double modulus = 0.0;  // H
};

struct SwiftHardening {
    double gamma0 = 0.0;
    double exponent = 0.0;
};

/// Isotropic hardening: initial yield stress plus R(gamma).
class HardeningLaw {
 public:
    static HardeningLaw linear(double yield_stress, double modulus);
    static HardeningLaw swift(double yield_stress, double gamma0, double exponent);

    double yield_stress() const noexcept { return yield_; }
    bool is_linear() const noexcept { return std::holds_alternative<LinearHardening>(law_); }
    const std::variant<LinearHardening, SwiftHardening>& law() const noexcept { return law_; }

    /// R(gamma)
    double hardening(double gamma) const;
    /// dR/dgamma
    double hardening_slope(double gamma) const;
    /// Closed-form integral of (yield + R) from 0 to gamma.
    double energy(double gamma) const;

 private:
    HardeningLaw(double yield, std::variant<LinearHardening, SwiftHardening> law);

    double yield_;
    std::variant<LinearHardening, SwiftHardening> law_;
};

/// Everything a quadrature point needs to evaluate its constitutive response.
struct Material {
    ElasticParams elastic;
    HardeningLaw hardening = HardeningLaw::linear(1.0, 0.0);
    /// Penalty on the normal constraint; non-positive means "use the shear modulus".
    double penalty = 0.0;

    double penalty_factor() const noexcept { return penalty > 0.0 ? penalty : elastic.shear; }
};

/// Committed history at a quadrature point. Tensors are stored as full 3x3
/// matrices: the out-of-plane components are needed for uniaxial and plane
/// strain.
struct PointState {
    Eigen::Matrix3d plastic_strain = Eigen::Matrix3d::Zero();
    double gamma = 0.0;
    Eigen::Matrix3d strain = Eigen::Matrix3d::Zero();  // total strain at time n
    Eigen::VectorXd alpha;  // last active normal parameters, empty while virgin
};

/// Local unknowns: plastic multiplier increment and normal parameters.
struct LocalUnknowns {
    double dgamma = 0.0;
    Eigen::VectorXd alpha;
};

/// Number of normal parameters for a spatial dimension (2 in 1D, 3 in 2D).
int alpha_size(int dimension);
/// Constraint matrix M with N(alpha):N(alpha) = alpha^T M alpha.
Eigen::MatrixXd constraint_matrix(int dimension);
/// Basis tensors G_k with N(alpha) = sum_k alpha_k G_k.
const Eigen::Matrix3d& normal_basis(int dimension, int k);
Eigen::Matrix3d plastic_normal(const Eigen::VectorXd& alpha);
/// Normal parameters of a uniaxial-x flow direction, used for virgin points.
Eigen::VectorXd default_alpha(int dimension);
/// Parameters reproducing a given traceless normal (least squares on the basis).
Eigen::VectorXd alpha_from_normal(const Eigen::Matrix3d& normal, int dimension);

/// Normal parameters of the elastic-predictor flow direction
/// sqrt(3/2) e/|e| with e = dev(strain) - eps_p. Empty when e vanishes.
Eigen::VectorXd predictor_alpha(const Eigen::Matrix3d& strain, const PointState& state, int dimension);

/// Embed a d*d flattened strain (row-major) as a 3x3 tensor, zero elsewhere.
Eigen::Matrix3d embed(const Eigen::VectorXd& flat, int dimension);
/// Row-major d*d flatten of the leading block of a 3x3 tensor.
Eigen::VectorXd flatten(const Eigen::Matrix3d& tensor, int dimension);
Eigen::Matrix3d deviator(const Eigen::Matrix3d& tensor);
double von_mises(const Eigen::Matrix3d& stress);

/// Psi = K/2 tr(eps)^2 + mu |dev eps - eps_p|^2
double elastic_energy(const Eigen::Matrix3d& strain, const Eigen::Matrix3d& plastic_strain,
                      const ElasticParams& params);
double elastic_energy(const Eigen::VectorXd& strain, int dimension, const ElasticParams& params);

/// Incremental energy from the committed state to (strain, unknowns):
/// Psi_{n+1} - Psi_n + hardening energy increment.
double j2_energy_increment(const Eigen::Matrix3d& strain, const PointState& state, const LocalUnknowns& unknowns,
                           const Material& material);

/// c (alpha^T M alpha - 3/2)^2
double normal_penalty(const Eigen::VectorXd& alpha, double factor);

struct LocalFunctional {
    double value = 0.0;
    Eigen::VectorXd gradient;  // [dgamma, alpha...]
    Eigen::MatrixXd hessian;
};

/// Energy increment plus normal penalty, with exact derivatives in
/// (dgamma, alpha).
LocalFunctional augmented_local_functional(const Eigen::Matrix3d& strain, const PointState& state,
                                           const LocalUnknowns& unknowns, const Material& material);

struct StressTangent {
    Eigen::VectorXd stress;   // d*d flatten
    Eigen::MatrixXd tangent;  // d*d x d*d
};

Eigen::Matrix3d stress_tensor(const Eigen::Matrix3d& strain, const PointState& state, const LocalUnknowns& unknowns,
                              const ElasticParams& params);
StressTangent stress_and_tangent(const Eigen::Matrix3d& strain, const PointState& state,
                                 const LocalUnknowns& unknowns, const ElasticParams& params, int dimension);
/// Constant isotropic elastic operator in the d*d flatten.
Eigen::MatrixXd elastic_tangent(const ElasticParams& params, int dimension);

/// State at n+1 after accepting the local unknowns.
PointState commit_state(const PointState& state, const LocalUnknowns& unknowns, const Eigen::Matrix3d& strain);

}  // namespace qafem
