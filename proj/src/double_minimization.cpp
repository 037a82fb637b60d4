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

#include "qafem/double_minimization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qafem {

DoubleMinConfig::DoubleMinConfig() {
    internal.max_iterations = 100;
    internal.max_failed = 30;
}

void DoubleMinConfig::validate() const {
    displacement.validate();
    internal.validate();
    if (!(tolerance > 0.0)) throw ConfigError("outer tolerance must be positive");
    if (max_outer < 1) throw ConfigError("max_outer must be at least 1");
    if (!(dgamma_interval > 0.0) || !(alpha_interval > 0.0) || !(alpha_bound > 0.0)) {
        throw ConfigError("internal-variable intervals and bounds must be positive");
    }
}

// ---------------------------------------------------------------------------

DisplacementObjective::DisplacementObjective(const Structure& structure, const Eigen::VectorXd& q,
                                             const History& history, const Eigen::VectorXd& f_ext)
    : structure_(structure), q_(q), history_(history), f_ext_(f_ext), prescribed_(structure.prescribed()) {}

double DisplacementObjective::block_value(std::size_t, const Eigen::VectorXd& v) {
    return structure_.assemble_phi(structure_.dofs().expand(v, prescribed_), q_, history_, f_ext_);
}

QuadraticForm DisplacementObjective::block_model(std::size_t, const Eigen::VectorXd& v) {
    return structure_.quadratic_model_U(structure_.dofs().expand(v, prescribed_), q_, history_, f_ext_).form;
}

InternalObjective::InternalObjective(const Structure& structure, const Eigen::VectorXd& displacement,
                                     const History& history)
    : structure_(structure), history_(history) {
    strains_.reserve(structure.num_points());
    for (std::size_t p = 0; p < structure.num_points(); ++p) strains_.push_back(structure.point_strain(p, displacement));
}

std::vector<VariableBlock> InternalObjective::blocks() const {
    std::vector<VariableBlock> out;
    const std::size_t s = structure_.dofs().q_stride();
    for (std::size_t p = 0; p < structure_.num_points(); ++p) out.push_back({p * s, s});
    return out;
}

LocalUnknowns InternalObjective::unknowns(const Eigen::VectorXd& v) const {
    LocalUnknowns u;
    u.dgamma = v(0);
    u.alpha = v.tail(v.size() - 1);
    return u;
}

double InternalObjective::block_value(std::size_t block, const Eigen::VectorXd& v) {
    return structure_.point_functional(block, strains_[block], history_.points[block], unknowns(v)).value;
}

QuadraticForm InternalObjective::block_model(std::size_t block, const Eigen::VectorXd& v) {
    const auto lf = structure_.point_functional(block, strains_[block], history_.points[block], unknowns(v));
    QuadraticForm form;
    form.gradient = lf.gradient;
    form.hessian = lf.hessian.sparseView();
    return form;
}

// ---------------------------------------------------------------------------

void internal_bounds(const Structure& structure, const DoubleMinConfig& config, Eigen::VectorXd& lower,
                     Eigen::VectorXd& upper, Eigen::VectorXd& eps0) {
    const auto& dofs = structure.dofs();
    const auto n = static_cast<Eigen::Index>(dofs.num_q());
    const double levels = std::ldexp(1.0, config.internal.qubits) - 1.0;
    lower.resize(n);
    upper.resize(n);
    eps0.resize(n);
    for (std::size_t p = 0; p < structure.num_points(); ++p) {
        for (std::size_t s = 0; s < dofs.q_stride(); ++s) {
            const auto i = static_cast<Eigen::Index>(dofs.q_index(p, s));
            if (s == 0) {
                lower(i) = 0.0;
                upper(i) = std::numeric_limits<double>::infinity();
                eps0(i) = config.dgamma_interval / levels;
            } else {
                lower(i) = -config.alpha_bound;
                upper(i) = config.alpha_bound;
                eps0(i) = config.alpha_interval / levels;
            }
        }
    }
}

void refresh_normals(const Structure& structure, const Eigen::VectorXd& displacement, const History& history,
                     const DoubleMinConfig& config, Eigen::VectorXd& q) {
    const auto& dofs = structure.dofs();
    const auto na = static_cast<Eigen::Index>(dofs.q_stride() - 1);
    for (std::size_t p = 0; p < structure.num_points(); ++p) {
        if (q(static_cast<Eigen::Index>(dofs.q_index(p, 0))) != 0.0) continue;
        Eigen::VectorXd a = predictor_alpha(structure.point_strain(p, displacement), history.points[p],
                                            structure.dimension());
        if (a.size() == 0) continue;
        a = a.cwiseMax(-config.alpha_bound).cwiseMin(config.alpha_bound);
        q.segment(static_cast<Eigen::Index>(dofs.q_index(p, 1)), na) = a;
    }
}

namespace {

double displacement_interval(const Structure& structure, const History& history, const DoubleMinConfig& config) {
    if (config.displacement_interval > 0.0) return config.displacement_interval;
    const auto& dofs = structure.dofs();
    const Eigen::VectorXd pres = structure.prescribed();
    double scale = 0.0;
    for (std::size_t k = 0; k < dofs.num_full(); ++k) {
        if (!dofs.constrained(k)) continue;
        const auto i = static_cast<Eigen::Index>(k);
        scale = std::max(scale, std::abs(pres(i) - history.displacement(i)));
    }
    if (scale > 0.0) return scale;
    const auto& mesh = structure.mesh();
    for (int c = 0; c < structure.dimension(); ++c) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t n = 0; n < mesh.num_nodes(); ++n) {
            lo = std::min(lo, mesh.node(n)[static_cast<std::size_t>(c)]);
            hi = std::max(hi, mesh.node(n)[static_cast<std::size_t>(c)]);
        }
        scale = std::max(scale, hi - lo);
    }
    return scale / 100.0;
}

/// Inner records in terms of the full potential: `offset` is added to the
/// objective values and `initial` is the potential before the first iteration.
void append_trace(std::vector<TraceRecord>& trace, int step, int outer, const char* phase, const SqpResult& r,
                  double offset, double initial) {
    RelativeChange change(initial);
    double previous = initial;
    for (const auto& it : r.trace) {
        const double phi = it.value + offset;
        trace.push_back({step, outer, phase, it.iteration, phi, change(previous, phi)});
        previous = phi;
    }
}

}  // namespace

StepResult double_minimize(const Structure& structure, const Eigen::VectorXd& f_ext, const History& history,
                           const DoubleMinConfig& config, Sampler& displacement_sampler, Sampler& internal_sampler,
                           std::uint64_t seed, int step) {
    config.validate();
    const auto& dofs = structure.dofs();
    const Eigen::VectorXd pres = structure.prescribed();

    StepResult out;
    Eigen::VectorXd u_free = dofs.restrict(history.displacement);
    Eigen::VectorXd q = structure.initial_internal(history);

    const double levels_u = std::ldexp(1.0, config.displacement.qubits) - 1.0;
    const auto nu = static_cast<Eigen::Index>(dofs.num_free());
    const Eigen::VectorXd u_eps0 =
        Eigen::VectorXd::Constant(nu, displacement_interval(structure, history, config) / levels_u);
    const Eigen::VectorXd u_lower = Eigen::VectorXd::Constant(nu, -std::numeric_limits<double>::infinity());
    const Eigen::VectorXd u_upper = Eigen::VectorXd::Constant(nu, std::numeric_limits<double>::infinity());

    Eigen::VectorXd q_lower, q_upper, q_eps0;
    internal_bounds(structure, config, q_lower, q_upper, q_eps0);
    std::vector<std::uint64_t> point_ids(structure.num_points());
    for (std::size_t p = 0; p < point_ids.size(); ++p) point_ids[p] = p;

    double phi_u0 = 0.0;
    for (int k = 1; k <= config.max_outer; ++k) {
        const auto ku = static_cast<std::uint64_t>(k);

        DisplacementObjective u_obj(structure, q, history, f_ext);
        const double phi_start = structure.assemble_phi(dofs.expand(u_free, pres), q, history, f_ext);
        const SqpResult ru = qa_sqp_minimize(u_obj, u_free, u_lower, u_upper, u_eps0, config.displacement,
                                             displacement_sampler, derive_seed(seed, ku, 0));
        u_free = ru.v;
        const std::size_t first_u = out.trace.size();
        append_trace(out.trace, step, k, "U", ru, 0.0, phi_start);
        out.displacement_iterations.push_back(ru.iterations);
        for (std::size_t i = first_u; i < out.trace.size(); ++i) {
            if (ru.trace[i - first_u].accepted > 0) out.final_inner_error = out.trace[i].relative_error;
        }
        const Eigen::VectorXd u_full = dofs.expand(u_free, pres);
        const double phi_u = structure.assemble_phi(u_full, q, history, f_ext);
        if (k == 1) phi_u0 = phi_u;

        refresh_normals(structure, u_full, history, config, q);
        const double work = (u_full - history.displacement).dot(f_ext);
        const double phi_q_start = structure.assemble_phi(u_full, q, history, f_ext);
        InternalObjective q_obj(structure, u_full, history);
        const SqpResult rq = qa_sqp_minimize(q_obj, q, q_lower, q_upper, q_eps0, config.internal, internal_sampler,
                                             derive_seed(seed, ku, 1), point_ids);
        q = rq.v;
        append_trace(out.trace, step, k, "Q", rq, -work, phi_q_start);
        out.internal_iterations.push_back(rq.iterations);
        const double phi_q = structure.assemble_phi(u_full, q, history, f_ext);

        double err = std::abs(phi_u - phi_q);
        if (phi_u0 != 0.0) err /= std::abs(phi_u0);
        out.trace.push_back({step, k, "outer", 0, phi_q, err});
        out.outer_iterations = k;
        out.outer_error = err;
        out.phi = phi_q;
        if (err <= config.tolerance) {
            out.displacement = u_full;
            out.internal = q;
            out.history = structure.commit(u_full, q, history);
            return out;
        }
    }
    throw NonConvergenceError("double minimisation did not converge in " + std::to_string(config.max_outer) +
                                  " outer iterations (step " + std::to_string(step) + ")",
                              std::move(out.trace));
}

}  // namespace qafem
