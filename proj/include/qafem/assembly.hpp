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

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "qafem/encoding.hpp"
#include "qafem/material.hpp"
#include "qafem/mesh.hpp"

namespace qafem {

/// Prescribed displacement component on a node set.
struct DirichletCondition {
    std::string node_set;
    int component = 0;
    double value = 0.0;
};

struct Traction {
    std::string face_set;
    Eigen::Vector2d value = Eigen::Vector2d::Zero();  // MPa
};

struct Loads {
    Eigen::Vector2d body_force = Eigen::Vector2d::Zero();  // MPa/mm
    std::vector<Traction> tractions;
};

/// Numbering of the free displacement dofs and of the internal-variable dofs.
/// Full displacement dofs are node-major: node * d + component.
class DofMap {
 public:
    DofMap(const Mesh& mesh, const std::vector<DirichletCondition>& conditions, std::size_t num_points);

    int dimension() const noexcept { return dimension_; }
    std::size_t num_full() const noexcept { return free_of_full_.size(); }
    std::size_t num_free() const noexcept { return full_of_free_.size(); }
    bool constrained(std::size_t full) const { return free_of_full_.at(full) < 0; }
    /// -1 for constrained dofs.
    long free_index(std::size_t full) const { return free_of_full_.at(full); }
    std::size_t full_index(std::size_t free) const { return full_of_free_.at(free); }

    /// Full vector carrying the prescribed values on constrained dofs and
    /// `free_values` elsewhere.
    Eigen::VectorXd expand(const Eigen::VectorXd& free_values, const Eigen::VectorXd& prescribed) const;
    Eigen::VectorXd restrict(const Eigen::VectorXd& full) const;
    /// Full-size vector of the prescribed values (zero on free dofs).
    Eigen::VectorXd prescribed(const Mesh& mesh, const std::vector<DirichletCondition>& conditions) const;

    std::size_t num_points() const noexcept { return num_points_; }
    std::size_t q_stride() const noexcept { return q_stride_; }
    std::size_t num_q() const noexcept { return num_points_ * q_stride_; }
    /// Slot 0 is the plastic multiplier increment, slots 1.. the normal parameters.
    std::size_t q_index(std::size_t point, std::size_t slot) const { return point * q_stride_ + slot; }

 private:
    int dimension_;
    std::vector<long> free_of_full_;
    std::vector<std::size_t> full_of_free_;
    std::size_t num_points_;
    std::size_t q_stride_;
};

/// Committed state at time n.
struct History {
    Eigen::VectorXd displacement;  // full
    std::vector<PointState> points;
};

struct QuadraticModel {
    enum class Space { displacement, internal };
    Space space = Space::displacement;
    double value = 0.0;
    QuadraticForm form;
};

/// Mesh, quadrature, material and constraints of one simulation.
class Structure {
 public:
    Structure(Mesh mesh, Material material, std::vector<DirichletCondition> dirichlet);

    const Mesh& mesh() const noexcept { return mesh_; }
    const QuadratureRule& rule() const noexcept { return rule_; }
    const KinematicTables& tables() const noexcept { return tables_; }
    const Material& material() const noexcept { return material_; }
    const DofMap& dofs() const noexcept { return dofs_; }
    const std::vector<DirichletCondition>& dirichlet() const noexcept { return dirichlet_; }
    int dimension() const noexcept { return mesh_.dimension(); }
    std::size_t num_points() const noexcept { return point_element_.size(); }
    std::size_t point_element(std::size_t p) const { return point_element_.at(p); }
    std::size_t point_local(std::size_t p) const { return point_local_.at(p); }
    const PointKinematics& kinematics(std::size_t p) const;

    /// Replace the Dirichlet values (same node sets and components).
    void set_dirichlet_values(const std::vector<DirichletCondition>& conditions);
    Eigen::VectorXd prescribed() const { return dofs_.prescribed(mesh_, dirichlet_); }

    History initial_history() const;
    /// Internal variables of a step start: zero increments, normals from history.
    Eigen::VectorXd initial_internal(const History& history) const;
    LocalUnknowns point_unknowns(const Eigen::VectorXd& q, std::size_t p) const;

    Eigen::Matrix3d point_strain(std::size_t p, const Eigen::VectorXd& displacement) const;

    /// Full-size work-conjugate external force vector.
    Eigen::VectorXd external_force(const Loads& loads) const;

    /// Incremental potential: quadrature sum of the augmented energy increment
    /// minus the work of f_ext over the displacement increment.
    double assemble_phi(const Eigen::VectorXd& displacement, const Eigen::VectorXd& q, const History& history,
                        const Eigen::VectorXd& f_ext) const;

    /// Full-size internal force sum(w B^T sigma).
    Eigen::VectorXd internal_force(const Eigen::VectorXd& displacement, const Eigen::VectorXd& q,
                                   const History& history) const;

    /// Model over the free displacement dofs: gradient = internal - external
    /// force, Hessian = elastic stiffness.
    QuadraticModel quadratic_model_U(const Eigen::VectorXd& displacement, const Eigen::VectorXd& q,
                                     const History& history, const Eigen::VectorXd& f_ext) const;

    /// Model over the internal variables; the Hessian is block diagonal.
    QuadraticModel quadratic_model_Q(const Eigen::VectorXd& displacement, const Eigen::VectorXd& q,
                                     const History& history, const Eigen::VectorXd& f_ext) const;

    /// Weighted local functional of one point (value, gradient, Hessian).
    LocalFunctional point_functional(std::size_t p, const Eigen::Matrix3d& strain, const PointState& state,
                                     const LocalUnknowns& unknowns) const;

    /// Free-dof elastic stiffness; throws RankDeficiencyError when singular.
    const Eigen::SparseMatrix<double>& stiffness() const;
    /// Full-size elastic stiffness (no constraints applied).
    Eigen::SparseMatrix<double> full_stiffness() const;

    /// History at n+1.
    History commit(const Eigen::VectorXd& displacement, const Eigen::VectorXd& q, const History& history) const;

    /// Sum of internal force components on a node set.
    double reaction(const Eigen::VectorXd& displacement, const Eigen::VectorXd& q, const History& history,
                    const std::string& node_set, int component) const;

 private:
    Mesh mesh_;
    QuadratureRule rule_;
    KinematicTables tables_;
    Material material_;
    std::vector<DirichletCondition> dirichlet_;
    std::vector<std::size_t> point_element_;
    std::vector<std::size_t> point_local_;
    DofMap dofs_;
    mutable std::optional<Eigen::SparseMatrix<double>> stiffness_;
};

}  // namespace qafem
