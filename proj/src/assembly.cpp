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

#include "qafem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

#include "qafem/errors.hpp"

namespace qafem {

DofMap::DofMap(const Mesh& mesh, const std::vector<DirichletCondition>& conditions, std::size_t num_points)
    : dimension_(mesh.dimension()),
      num_points_(num_points),
      q_stride_(1 + static_cast<std::size_t>(alpha_size(mesh.dimension()))) {
    const auto d = static_cast<std::size_t>(dimension_);
    std::vector<bool> fixed(mesh.num_nodes() * d, false);
    for (const auto& c : conditions) {
        if (c.component < 0 || c.component >= dimension_) {
            throw ConfigError("Dirichlet component " + std::to_string(c.component) + " out of range");
        }
        for (auto n : mesh.node_set(c.node_set)) fixed[n * d + static_cast<std::size_t>(c.component)] = true;
    }
    free_of_full_.assign(fixed.size(), -1);
    for (std::size_t k = 0; k < fixed.size(); ++k) {
        if (fixed[k]) continue;
        free_of_full_[k] = static_cast<long>(full_of_free_.size());
        full_of_free_.push_back(k);
    }
}

Eigen::VectorXd DofMap::expand(const Eigen::VectorXd& free_values, const Eigen::VectorXd& prescribed) const {
    if (static_cast<std::size_t>(free_values.size()) != num_free() ||
        static_cast<std::size_t>(prescribed.size()) != num_full()) {
        throw ContractError("dof vector sizes do not match the dof map");
    }
    Eigen::VectorXd full = prescribed;
    for (std::size_t k = 0; k < num_free(); ++k) full(static_cast<Eigen::Index>(full_of_free_[k])) = free_values(static_cast<Eigen::Index>(k));
    return full;
}

Eigen::VectorXd DofMap::restrict(const Eigen::VectorXd& full) const {
    if (static_cast<std::size_t>(full.size()) != num_full()) throw ContractError("full dof vector has the wrong size");
    Eigen::VectorXd out(static_cast<Eigen::Index>(num_free()));
    for (std::size_t k = 0; k < num_free(); ++k) out(static_cast<Eigen::Index>(k)) = full(static_cast<Eigen::Index>(full_of_free_[k]));
    return out;
}

Eigen::VectorXd DofMap::prescribed(const Mesh& mesh, const std::vector<DirichletCondition>& conditions) const {
    const auto d = static_cast<std::size_t>(dimension_);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_full()));
    for (const auto& c : conditions) {
        for (auto n : mesh.node_set(c.node_set)) out(static_cast<Eigen::Index>(n * d + static_cast<std::size_t>(c.component))) = c.value;
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void check_finite(const Eigen::VectorXd& v, const char* what) {
    if (!v.allFinite()) throw NumericError(std::string(what) + " contains a non-finite value");
}

Eigen::VectorXd gather(const Eigen::VectorXd& full, const std::vector<std::size_t>& dofs) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(dofs.size()));
    for (std::size_t k = 0; k < dofs.size(); ++k) out(static_cast<Eigen::Index>(k)) = full(static_cast<Eigen::Index>(dofs[k]));
    return out;
}

}  // namespace

Structure::Structure(Mesh mesh, Material material, std::vector<DirichletCondition> dirichlet)
    : mesh_(std::move(mesh)),
      rule_(mesh_),
      tables_(mesh_, rule_),
      material_(std::move(material)),
      dirichlet_(std::move(dirichlet)),
      dofs_(mesh_, dirichlet_, rule_.num_points()) {
    for (std::size_t e = 0; e < mesh_.num_elements(); ++e) {
        for (std::size_t eta = 0; eta < rule_.points(e).size(); ++eta) {
            point_element_.push_back(e);
            point_local_.push_back(eta);
        }
    }
}

const PointKinematics& Structure::kinematics(std::size_t p) const {
    return tables_.at(point_element_.at(p), point_local_.at(p));
}

void Structure::set_dirichlet_values(const std::vector<DirichletCondition>& conditions) {
    if (conditions.size() != dirichlet_.size()) throw ContractError("Dirichlet conditions changed shape");
    for (std::size_t k = 0; k < conditions.size(); ++k) {
        if (conditions[k].node_set != dirichlet_[k].node_set || conditions[k].component != dirichlet_[k].component) {
            throw ContractError("Dirichlet conditions changed shape");
        }
        dirichlet_[k].value = conditions[k].value;
    }
}

History Structure::initial_history() const {
    History h;
    h.displacement = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs_.num_full()));
    h.points.assign(num_points(), PointState{});
    return h;
}

Eigen::VectorXd Structure::initial_internal(const History& history) const {
    const int d = dimension();
    Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs_.num_q()));
    for (std::size_t p = 0; p < num_points(); ++p) {
        const auto& alpha = history.points.at(p).alpha;
        const Eigen::VectorXd a = alpha.size() > 0 ? alpha : default_alpha(d);
        q.segment(static_cast<Eigen::Index>(dofs_.q_index(p, 1)), a.size()) = a;
    }
    return q;
}

LocalUnknowns Structure::point_unknowns(const Eigen::VectorXd& q, std::size_t p) const {
    LocalUnknowns u;
    u.dgamma = q(static_cast<Eigen::Index>(dofs_.q_index(p, 0)));
    u.alpha = q.segment(static_cast<Eigen::Index>(dofs_.q_index(p, 1)), static_cast<Eigen::Index>(dofs_.q_stride() - 1));
    return u;
}

Eigen::Matrix3d Structure::point_strain(std::size_t p, const Eigen::VectorXd& displacement) const {
    const auto& k = kinematics(p);
    const Eigen::VectorXd ue = gather(displacement, element_dofs(mesh_, point_element_[p]));
    return embed(k.B * ue, dimension());
}

Eigen::VectorXd Structure::external_force(const Loads& loads) const {
    const int d = dimension();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs_.num_full()));
    const Eigen::VectorXd b = loads.body_force.head(d);
    if (b.squaredNorm() > 0.0) {
        for (std::size_t e = 0; e < mesh_.num_elements(); ++e) {
            const auto dofs = element_dofs(mesh_, e);
            for (std::size_t eta = 0; eta < tables_.num_points(e); ++eta) {
                const auto& k = tables_.at(e, eta);
                const Eigen::VectorXd fe = k.weight * k.N.transpose() * b;
                for (std::size_t a = 0; a < dofs.size(); ++a) f(static_cast<Eigen::Index>(dofs[a])) += fe(static_cast<Eigen::Index>(a));
            }
        }
    }
    const double g = 1.0 / std::sqrt(3.0);
    for (const auto& t : loads.tractions) {
        if (!mesh_.has_face_set(t.face_set)) throw ConfigError("traction on unknown face set '" + t.face_set + "'");
        for (const auto& face : mesh_.face_set(t.face_set)) {
            const auto nodes = mesh_.face_nodes(face);
            if (d == 1) {
                f(static_cast<Eigen::Index>(nodes[0])) += t.value(0);
                continue;
            }
            const auto& x0 = mesh_.node(nodes[0]);
            const auto& x1 = mesh_.node(nodes[1]);
            const double length = std::hypot(x1[0] - x0[0], x1[1] - x0[1]);
            for (const double s : {-g, g}) {
                const double n0 = 0.5 * (1.0 - s), n1 = 0.5 * (1.0 + s);
                const double w = 0.5 * length;
                for (int c = 0; c < 2; ++c) {
                    f(static_cast<Eigen::Index>(nodes[0] * 2 + static_cast<std::size_t>(c))) += w * n0 * t.value(c);
                    f(static_cast<Eigen::Index>(nodes[1] * 2 + static_cast<std::size_t>(c))) += w * n1 * t.value(c);
                }
            }
        }
    }
    return f;
}

LocalFunctional Structure::point_functional(std::size_t p, const Eigen::Matrix3d& strain, const PointState& state,
                                            const LocalUnknowns& unknowns) const {
    LocalFunctional lf = augmented_local_functional(strain, state, unknowns, material_);
    const double w = kinematics(p).weight;
    lf.value *= w;
    lf.gradient *= w;
    lf.hessian *= w;
    return lf;
}

double Structure::assemble_phi(const Eigen::VectorXd& displacement, const Eigen::VectorXd& q, const History& history,
                               const Eigen::VectorXd& f_ext) const {
    check_finite(displacement, "displacement");
    check_finite(q, "internal variables");
    double phi = 0.0;
    for (std::size_t p = 0; p < num_points(); ++p) {
        const LocalUnknowns u = point_unknowns(q, p);
        const Eigen::Matrix3d strain = point_strain(p, displacement);
        phi += kinematics(p).weight * (j2_energy_increment(strain, history.points[p], u, material_) +
                                       normal_penalty(u.alpha, material_.penalty_factor()));
    }
    return phi - (displacement - history.displacement).dot(f_ext);
}

Eigen::VectorXd Structure::internal_force(const Eigen::VectorXd& displacement, const Eigen::VectorXd& q,
                                          const History& history) const {
    const int d = dimension();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs_.num_full()));
    for (std::size_t p = 0; p < num_points(); ++p) {
        const auto& k = kinematics(p);
        const auto dofs = element_dofs(mesh_, point_element_[p]);
        const Eigen::Matrix3d strain = point_strain(p, displacement);
        const Eigen::VectorXd sigma =
            flatten(stress_tensor(strain, history.points[p], point_unknowns(q, p), material_.elastic), d);
        const Eigen::VectorXd fe = k.weight * k.B.transpose() * sigma;
        for (std::size_t a = 0; a < dofs.size(); ++a) f(static_cast<Eigen::Index>(dofs[a])) += fe(static_cast<Eigen::Index>(a));
    }
    return f;
}

Eigen::SparseMatrix<double> Structure::full_stiffness() const {
    const int d = dimension();
    const Eigen::MatrixXd C = elastic_tangent(material_.elastic, d);
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t p = 0; p < num_points(); ++p) {
        const auto& k = kinematics(p);
        const auto dofs = element_dofs(mesh_, point_element_[p]);
        const Eigen::MatrixXd ke = k.weight * k.B.transpose() * C * k.B;
        for (std::size_t a = 0; a < dofs.size(); ++a) {
            for (std::size_t b = 0; b < dofs.size(); ++b) {
                trips.emplace_back(static_cast<int>(dofs[a]), static_cast<int>(dofs[b]),
                                   ke(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(dofs_.num_full());
    Eigen::SparseMatrix<double> K(n, n);
    K.setFromTriplets(trips.begin(), trips.end());
    return K;
}

const Eigen::SparseMatrix<double>& Structure::stiffness() const {
    if (stiffness_) return *stiffness_;
    const Eigen::SparseMatrix<double> full = full_stiffness();
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index col = 0; col < full.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(full, col); it; ++it) {
            const long r = dofs_.free_index(static_cast<std::size_t>(it.row()));
            const long c = dofs_.free_index(static_cast<std::size_t>(it.col()));
            if (r >= 0 && c >= 0) trips.emplace_back(static_cast<int>(r), static_cast<int>(c), it.value());
        }
    }
    const auto n = static_cast<Eigen::Index>(dofs_.num_free());
    Eigen::SparseMatrix<double> K(n, n);
    K.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(K);
    if (llt.info() != Eigen::Success) {
        throw RankDeficiencyError("elastic stiffness is singular: the Dirichlet conditions do not remove every rigid mode");
    }
    double min_pivot = std::numeric_limits<double>::infinity(), max_pivot = 0.0;
    const Eigen::VectorXd diag = llt.matrixL().toDense().diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        min_pivot = std::min(min_pivot, diag(i) * diag(i));
        max_pivot = std::max(max_pivot, diag(i) * diag(i));
    }
    if (!(min_pivot > 1e-12 * max_pivot)) {
        throw RankDeficiencyError("elastic stiffness is numerically singular: the Dirichlet conditions do not remove every rigid mode");
    }
    stiffness_ = std::move(K);
    return *stiffness_;
}

QuadraticModel Structure::quadratic_model_U(const Eigen::VectorXd& displacement, const Eigen::VectorXd& q,
                                            const History& history, const Eigen::VectorXd& f_ext) const {
    QuadraticModel m;
    m.space = QuadraticModel::Space::displacement;
    m.value = assemble_phi(displacement, q, history, f_ext);
    m.form.gradient = dofs_.restrict(internal_force(displacement, q, history) - f_ext);
    m.form.hessian = stiffness();
    return m;
}

QuadraticModel Structure::quadratic_model_Q(const Eigen::VectorXd& displacement, const Eigen::VectorXd& q,
                                            const History& history, const Eigen::VectorXd& f_ext) const {
    QuadraticModel m;
    m.space = QuadraticModel::Space::internal;
    const auto n = static_cast<Eigen::Index>(dofs_.num_q());
    const auto s = static_cast<Eigen::Index>(dofs_.q_stride());
    m.form.gradient = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t p = 0; p < num_points(); ++p) {
        const auto lf = point_functional(p, point_strain(p, displacement), history.points[p], point_unknowns(q, p));
        const auto off = static_cast<Eigen::Index>(dofs_.q_index(p, 0));
        m.form.gradient.segment(off, s) = lf.gradient;
        for (Eigen::Index i = 0; i < s; ++i) {
            for (Eigen::Index j = 0; j < s; ++j) trips.emplace_back(static_cast<int>(off + i), static_cast<int>(off + j), lf.hessian(i, j));
        }
    }
    m.form.hessian.resize(n, n);
    m.form.hessian.setFromTriplets(trips.begin(), trips.end());
    m.value = assemble_phi(displacement, q, history, f_ext);
    return m;
}

History Structure::commit(const Eigen::VectorXd& displacement, const Eigen::VectorXd& q, const History& history) const {
    History next;
    next.displacement = displacement;
    next.points.resize(num_points());
    for (std::size_t p = 0; p < num_points(); ++p) {
        next.points[p] = commit_state(history.points[p], point_unknowns(q, p), point_strain(p, displacement));
    }
    return next;
}

double Structure::reaction(const Eigen::VectorXd& displacement, const Eigen::VectorXd& q, const History& history,
                           const std::string& node_set, int component) const {
    const Eigen::VectorXd f = internal_force(displacement, q, history);
    const auto d = static_cast<std::size_t>(dimension());
    double sum = 0.0;
    for (auto n : mesh_.node_set(node_set)) sum += f(static_cast<Eigen::Index>(n * d + static_cast<std::size_t>(component)));
    return sum;
}

}  // namespace qafem
