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

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qafem/assembly.hpp"
#include "qafem/material.hpp"
#include "qafem/mesh.hpp"

namespace qafem {

/// Closed-form uniaxial-strain bar under the body force b0 with x = 0 fixed
/// and the far end free. Linear hardening only.
class BarSolution {
 public:
    BarSolution(const Material& material, double b0, double length);

    double b0() const noexcept { return b0_; }
    double length() const noexcept { return length_; }
    /// Load at which the fixed end starts to yield.
    double elastic_limit() const noexcept { return b_star_; }
    /// Transition between plastic (x < x_c) and elastic regions; 0 when elastic.
    double transition() const noexcept { return x_c_; }

    double stress(double x) const;
    double displacement(double x) const;
    double strain(double x) const;
    double gamma(double x) const;

 private:
    double b0_, length_;
    double c_;   // K + 4 mu / 3
    double mu_;
    double yield_, modulus_;
    double b_star_, x_c_;
    double slope_, intercept_;  // plastic strain = slope * sigma + intercept
};

BarSolution bar_analytic(const Material& material, double b0, double length);

struct RadialReturn {
    double dgamma = 0.0;
    Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();  // 3/2 dev(sigma_trial) / sigma_eq_trial
    Eigen::Matrix3d stress = Eigen::Matrix3d::Zero();
    double trial_equivalent = 0.0;
};

/// Classical elastic predictor / plastic corrector for J2 with isotropic hardening.
RadialReturn radial_return_point(const Eigen::Matrix3d& strain, const PointState& state, const Material& material);

/// One stage of a load path: Dirichlet values and loads reached at `time`.
struct LoadStep {
    double time = 0.0;
    std::vector<DirichletCondition> dirichlet;
    Loads loads;
};

struct NewtonOptions {
    double tolerance = 1e-10;
    int max_iterations = 50;
    int max_cuts = 10;
    std::string reaction_set;
    int reaction_component = 0;
};

struct NewtonStep {
    double time = 0.0;
    Eigen::VectorXd displacement;
    Eigen::VectorXd gamma;  // per quadrature point
    double reaction = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

/// Incremental Newton-Raphson FEM with return mapping and the consistent
/// tangent. Failed increments are halved up to max_cuts times.
std::vector<NewtonStep> newton_fem_reference(const Mesh& mesh, const Material& material,
                                             const std::vector<LoadStep>& path, const NewtonOptions& options = {});

}  // namespace qafem
