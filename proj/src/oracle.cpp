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

#include "qafem/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "qafem/errors.hpp"

namespace qafem {

BarSolution::BarSolution(const Material& material, double b0, double length)
    : b0_(b0), length_(length) {
    if (!material.hardening.is_linear()) throw UnsupportedLawError("the closed-form bar needs linear hardening");
    if (!(b0 > 0.0)) throw InvalidArgumentError("bar load b0 must be positive");
    if (!(length > 0.0)) throw InvalidArgumentError("bar length must be positive");
    mu_ = material.elastic.shear;
    c_ = material.elastic.bulk + 4.0 * mu_ / 3.0;
    yield_ = material.hardening.yield_stress();
    modulus_ = std::get<LinearHardening>(material.hardening.law()).modulus;
    const double sigma_star = c_ * yield_ / (2.0 * mu_);
    b_star_ = sigma_star / length;
    x_c_ = std::max(0.0, length - sigma_star / b0);
    const double d = 3.0 * mu_ + modulus_ - 4.0 * mu_ * mu_ / c_;
    slope_ = 1.0 / c_ + 4.0 * mu_ * mu_ / (c_ * c_ * d);
    intercept_ = -2.0 * mu_ * yield_ / (c_ * d);
}

double BarSolution::stress(double x) const { return b0_ * (length_ - x); }

double BarSolution::gamma(double x) const {
    if (x >= x_c_) return 0.0;
    const double d = 3.0 * mu_ + modulus_ - 4.0 * mu_ * mu_ / c_;
    return std::max(0.0, (2.0 * mu_ * stress(x) / c_ - yield_) / d);
}

double BarSolution::strain(double x) const {
    if (x >= x_c_) return stress(x) / c_;
    return slope_ * stress(x) + intercept_;
}

double BarSolution::displacement(double x) const {
    const auto integral = [&](double a, double b) {
        return b0_ * ((length_ * b - 0.5 * b * b) - (length_ * a - 0.5 * a * a));
    };
    if (x <= x_c_) return slope_ * integral(0.0, x) + intercept_ * x;
    return slope_ * integral(0.0, x_c_) + intercept_ * x_c_ + integral(x_c_, x) / c_;
}

BarSolution bar_analytic(const Material& material, double b0, double length) {
    return BarSolution(material, b0, length);
}

// ---------------------------------------------------------------------------

RadialReturn radial_return_point(const Eigen::Matrix3d& strain, const PointState& state, const Material& material) {
    const double k = material.elastic.bulk, mu = material.elastic.shear;
    const auto& law = material.hardening;
    const Eigen::Matrix3d s_trial = 2.0 * mu * (deviator(strain) - state.plastic_strain);
    const Eigen::Matrix3d volumetric = k * strain.trace() * Eigen::Matrix3d::Identity();

    RadialReturn out;
    out.trial_equivalent = std::sqrt(1.5) * s_trial.norm();
    if (out.trial_equivalent > 0.0) out.normal = 1.5 * s_trial / out.trial_equivalent;
    const double f = out.trial_equivalent - law.yield_stress() - law.hardening(state.gamma);
    if (f <= 0.0) {
        out.stress = volumetric + s_trial;
        return out;
    }

    double dg = 0.0;
    if (law.is_linear()) {
        dg = f / (3.0 * mu + std::get<LinearHardening>(law.law()).modulus);
    } else {
        const auto g = [&](double x) {
            return out.trial_equivalent - 3.0 * mu * x - law.yield_stress() - law.hardening(state.gamma + x);
        };
        double lo = 0.0, hi = f / (3.0 * mu);
        dg = 0.5 * hi;
        bool converged = false;
        for (int it = 0; it < 200; ++it) {
            const double r = g(dg);
            if (std::abs(r) <= 1e-14 * out.trial_equivalent) {
                converged = true;
                break;
            }
            (r > 0.0 ? lo : hi) = dg;
            double next = dg + r / (3.0 * mu + law.hardening_slope(state.gamma + dg));
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (hi - lo <= 1e-16 * hi) {
                dg = next;
                converged = true;
                break;
            }
            dg = next;
        }
        if (!converged || !std::isfinite(dg)) throw NumericError("radial return scalar solve did not converge");
    }
    out.dgamma = dg;
    out.stress = volumetric + s_trial - 2.0 * mu * dg * out.normal;
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct PointHistory {
    Eigen::Matrix3d plastic_strain = Eigen::Matrix3d::Zero();
    double gamma = 0.0;
};

struct Stage {
    std::vector<double> dirichlet;
    Eigen::Vector2d body = Eigen::Vector2d::Zero();
    std::vector<Eigen::Vector2d> tractions;
};

Stage stage_of(const LoadStep& step) {
    Stage s;
    for (const auto& c : step.dirichlet) s.dirichlet.push_back(c.value);
    s.body = step.loads.body_force;
    for (const auto& t : step.loads.tractions) s.tractions.push_back(t.value);
    return s;
}

Stage blend(const Stage& a, const Stage& b, double s) {
    Stage out = b;
    for (std::size_t k = 0; k < out.dirichlet.size(); ++k) out.dirichlet[k] = a.dirichlet[k] + s * (b.dirichlet[k] - a.dirichlet[k]);
    out.body = a.body + s * (b.body - a.body);
    for (std::size_t k = 0; k < out.tractions.size(); ++k) out.tractions[k] = a.tractions[k] + s * (b.tractions[k] - a.tractions[k]);
    return out;
}

class NewtonSolver {
 public:
    NewtonSolver(const Mesh& mesh, const Material& material, const LoadStep& shape, const NewtonOptions& options)
        : mesh_(mesh), material_(material), rule_(mesh), tables_(mesh, rule_), shape_(shape), options_(options) {
        d_ = mesh.dimension();
        const auto nd = static_cast<std::size_t>(d_);
        n_ = mesh.num_nodes() * nd;
        fixed_.assign(n_, false);
        for (const auto& c : shape.dirichlet) {
            if (c.component < 0 || c.component >= d_) throw ConfigError("Dirichlet component out of range");
            for (auto node : mesh.node_set(c.node_set)) fixed_[node * nd + static_cast<std::size_t>(c.component)] = true;
        }
        for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
            for (std::size_t eta = 0; eta < tables_.num_points(e); ++eta) points_.push_back({e, eta});
        }
        history_.assign(points_.size(), PointHistory{});
        u_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
    }

    std::size_t num_points() const { return points_.size(); }
    const Eigen::VectorXd& displacement() const { return u_; }
    const std::vector<PointHistory>& history() const { return history_; }

    /// Try to reach `target` from the committed state; commits on success.
    bool advance(const Stage& target, int& iterations, double& residual) {
        Eigen::VectorXd u = u_;
        const auto nd = static_cast<std::size_t>(d_);
        for (std::size_t k = 0; k < shape_.dirichlet.size(); ++k) {
            const auto& c = shape_.dirichlet[k];
            for (auto node : mesh_.node_set(c.node_set)) {
                u(static_cast<Eigen::Index>(node * nd + static_cast<std::size_t>(c.component))) = target.dirichlet[k];
            }
        }
        const Eigen::VectorXd f_ext = external_force(target);
        std::vector<Eigen::Index> free;
        for (std::size_t k = 0; k < n_; ++k) {
            if (!fixed_[k]) free.push_back(static_cast<Eigen::Index>(k));
        }
        const auto nf = static_cast<Eigen::Index>(free.size());
        std::vector<PointHistory> trial;
        for (int it = 0; it <= options_.max_iterations; ++it) {
            Eigen::VectorXd f_int;
            Eigen::MatrixXd kt;
            evaluate(u, f_int, kt, trial);
            Eigen::VectorXd r(nf);
            for (Eigen::Index i = 0; i < nf; ++i) r(i) = f_int(free[static_cast<std::size_t>(i)]) - f_ext(free[static_cast<std::size_t>(i)]);
            residual = r.norm();
            const double ref = std::max(f_ext.norm(), f_int.norm());
            if (!std::isfinite(residual)) return false;
            if (residual <= options_.tolerance * ref || nf == 0) {
                iterations = it;
                u_ = u;
                history_ = trial;
                last_f_int_ = f_int;
                return true;
            }
            if (it == options_.max_iterations) break;
            Eigen::MatrixXd kff(nf, nf);
            for (Eigen::Index i = 0; i < nf; ++i) {
                for (Eigen::Index j = 0; j < nf; ++j) kff(i, j) = kt(free[static_cast<std::size_t>(i)], free[static_cast<std::size_t>(j)]);
            }
            const Eigen::VectorXd du = kff.partialPivLu().solve(-r);
            if (!du.allFinite()) return false;
            for (Eigen::Index i = 0; i < nf; ++i) u(free[static_cast<std::size_t>(i)]) += du(i);
        }
        return false;
    }

    double reaction(const std::string& set, int component) const {
        if (set.empty() || last_f_int_.size() == 0) return 0.0;
        const auto nd = static_cast<std::size_t>(d_);
        double sum = 0.0;
        for (auto node : mesh_.node_set(set)) sum += last_f_int_(static_cast<Eigen::Index>(node * nd + static_cast<std::size_t>(component)));
        return sum;
    }

 private:
    Eigen::VectorXd external_force(const Stage& stage) const {
        Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
        const Eigen::VectorXd b = stage.body.head(d_);
        for (std::size_t e = 0; e < mesh_.num_elements(); ++e) {
            const auto dofs = element_dofs(mesh_, e);
            for (std::size_t eta = 0; eta < tables_.num_points(e); ++eta) {
                const auto& k = tables_.at(e, eta);
                const Eigen::VectorXd fe = k.weight * k.N.transpose() * b;
                for (std::size_t a = 0; a < dofs.size(); ++a) f(static_cast<Eigen::Index>(dofs[a])) += fe(static_cast<Eigen::Index>(a));
            }
        }
        const double g = 1.0 / std::sqrt(3.0);
        for (std::size_t t = 0; t < stage.tractions.size(); ++t) {
            const Eigen::Vector2d value = stage.tractions[t];
            for (const auto& face : mesh_.face_set(shape_.loads.tractions[t].face_set)) {
                const auto nodes = mesh_.face_nodes(face);
                if (d_ == 1) {
                    f(static_cast<Eigen::Index>(nodes[0])) += value(0);
                    continue;
                }
                const auto& x0 = mesh_.node(nodes[0]);
                const auto& x1 = mesh_.node(nodes[1]);
                const double half = 0.5 * std::hypot(x1[0] - x0[0], x1[1] - x0[1]);
                for (const double s : {-g, g}) {
                    for (int c = 0; c < 2; ++c) {
                        f(static_cast<Eigen::Index>(nodes[0] * 2 + static_cast<std::size_t>(c))) += half * 0.5 * (1.0 - s) * value(c);
                        f(static_cast<Eigen::Index>(nodes[1] * 2 + static_cast<std::size_t>(c))) += half * 0.5 * (1.0 + s) * value(c);
                    }
                }
            }
        }
        return f;
    }

    /// Internal force and consistent tangent at u; `trial` receives the
    /// updated point histories.
    void evaluate(const Eigen::VectorXd& u, Eigen::VectorXd& f_int, Eigen::MatrixXd& kt,
                  std::vector<PointHistory>& trial) const {
        const auto& start = history_;
        const auto n = static_cast<Eigen::Index>(n_);
        f_int = Eigen::VectorXd::Zero(n);
        kt = Eigen::MatrixXd::Zero(n, n);
        trial.resize(points_.size());
        const double k = material_.elastic.bulk, mu = material_.elastic.shear;
        const auto& law = material_.hardening;
        for (std::size_t p = 0; p < points_.size(); ++p) {
            const auto [e, eta] = points_[p];
            const auto& kin = tables_.at(e, eta);
            const auto dofs = element_dofs(mesh_, e);
            Eigen::VectorXd ue(static_cast<Eigen::Index>(dofs.size()));
            for (std::size_t a = 0; a < dofs.size(); ++a) ue(static_cast<Eigen::Index>(a)) = u(static_cast<Eigen::Index>(dofs[a]));
            const Eigen::VectorXd flat = kin.B * ue;
            Eigen::Matrix3d strain = Eigen::Matrix3d::Zero();
            for (int i = 0; i < d_; ++i) {
                for (int j = 0; j < d_; ++j) strain(i, j) = flat(i * d_ + j);
            }
            PointState state;
            state.plastic_strain = start[p].plastic_strain;
            state.gamma = start[p].gamma;
            const RadialReturn rr = radial_return_point(strain, state, material_);
            trial[p].plastic_strain = start[p].plastic_strain + rr.dgamma * rr.normal;
            trial[p].gamma = start[p].gamma + rr.dgamma;

            double theta = 1.0, theta_bar = 0.0;
            Eigen::Matrix3d nrm = Eigen::Matrix3d::Zero();
            if (rr.dgamma > 0.0) {
                theta = 1.0 - 3.0 * mu * rr.dgamma / rr.trial_equivalent;
                theta_bar = 1.0 / (1.0 + law.hardening_slope(trial[p].gamma) / (3.0 * mu)) - (1.0 - theta);
                nrm = rr.normal / std::sqrt(1.5);
            }
            const int dd = d_ * d_;
            Eigen::VectorXd sigma(dd);
            Eigen::MatrixXd c(dd, dd);
            for (int i = 0; i < d_; ++i) {
                for (int j = 0; j < d_; ++j) {
                    sigma(i * d_ + j) = rr.stress(i, j);
                    for (int a = 0; a < d_; ++a) {
                        for (int b = 0; b < d_; ++b) {
                            const double dij = i == j, dab = a == b;
                            const double sym = 0.5 * ((i == a) * (j == b) + (i == b) * (j == a));
                            c(i * d_ + j, a * d_ + b) = k * dij * dab + 2.0 * mu * theta * (sym - dij * dab / 3.0) -
                                                        2.0 * mu * theta_bar * nrm(i, j) * nrm(a, b);
                        }
                    }
                }
            }
            const Eigen::VectorXd fe = kin.weight * kin.B.transpose() * sigma;
            const Eigen::MatrixXd ke = kin.weight * kin.B.transpose() * c * kin.B;
            for (std::size_t a = 0; a < dofs.size(); ++a) {
                const auto ia = static_cast<Eigen::Index>(dofs[a]);
                f_int(ia) += fe(static_cast<Eigen::Index>(a));
                for (std::size_t b = 0; b < dofs.size(); ++b) {
                    kt(ia, static_cast<Eigen::Index>(dofs[b])) += ke(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                }
            }
        }
    }

    const Mesh& mesh_;
    const Material& material_;
    QuadratureRule rule_;
    KinematicTables tables_;
    LoadStep shape_;
    NewtonOptions options_;
    int d_ = 1;
    std::size_t n_ = 0;
    std::vector<bool> fixed_;
    std::vector<std::pair<std::size_t, std::size_t>> points_;
    std::vector<PointHistory> history_;
    Eigen::VectorXd u_;
    Eigen::VectorXd last_f_int_;
};

}  // namespace

std::vector<NewtonStep> newton_fem_reference(const Mesh& mesh, const Material& material,
                                             const std::vector<LoadStep>& path, const NewtonOptions& options) {
    if (path.empty()) return {};
    for (std::size_t s = 0; s < path.size(); ++s) {
        const auto& a = path[s];
        const auto& b = path.front();
        if (a.dirichlet.size() != b.dirichlet.size() || a.loads.tractions.size() != b.loads.tractions.size()) {
            throw ContractError("load path stages must share their boundary-condition layout");
        }
        for (std::size_t k = 0; k < a.dirichlet.size(); ++k) {
            if (a.dirichlet[k].node_set != b.dirichlet[k].node_set || a.dirichlet[k].component != b.dirichlet[k].component) {
                throw ContractError("load path stages must share their boundary-condition layout");
            }
        }
        if (s > 0 && !(a.time > path[s - 1].time)) throw ContractError("load path times must increase");
    }

    NewtonSolver solver(mesh, material, path.front(), options);
    Stage previous = stage_of(path.front());
    std::fill(previous.dirichlet.begin(), previous.dirichlet.end(), 0.0);
    previous.body.setZero();
    for (auto& t : previous.tractions) t.setZero();

    std::vector<NewtonStep> out;
    for (const auto& step : path) {
        const Stage target = stage_of(step);
        double done = 0.0, ds = 1.0;
        int cuts = 0, iterations = 0;
        double residual = 0.0;
        while (done < 1.0) {
            const double next = std::min(1.0, done + ds);
            int its = 0;
            if (solver.advance(blend(previous, target, next), its, residual)) {
                iterations += its;
                done = next;
                continue;
            }
            if (++cuts > options.max_cuts) {
                throw NumericError("Newton reference did not converge at t = " + std::to_string(step.time) +
                                   " after " + std::to_string(options.max_cuts) + " increment cuts");
            }
            ds *= 0.5;
        }
        NewtonStep result;
        result.time = step.time;
        result.displacement = solver.displacement();
        result.gamma.resize(static_cast<Eigen::Index>(solver.num_points()));
        for (std::size_t p = 0; p < solver.num_points(); ++p) result.gamma(static_cast<Eigen::Index>(p)) = solver.history()[p].gamma;
        result.reaction = solver.reaction(options.reaction_set, options.reaction_component);
        result.iterations = iterations;
        result.residual = residual;
        out.push_back(std::move(result));
        previous = target;
    }
    return out;
}

}  // namespace qafem
