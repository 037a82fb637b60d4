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

#include "qafem/qasqp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qafem/errors.hpp"

namespace qafem {

void SqpConfig::validate() const {
    if (qubits < 1 || qubits > 30) throw ConfigError("qubits must lie in [1, 30]");
    if (!(shrink > 0.0 && shrink < 1.0)) throw ConfigError("shrink factor must lie in (0, 1)");
    if (max_steps < 1 || max_failed < 1) throw ConfigError("max_steps and max_failed must be at least 1");
    if (max_iterations < 0) throw ConfigError("max_iterations must be non-negative");
    if (!(tolerance >= 0.0)) throw ConfigError("tolerance must be non-negative");
    if (!(eps_min_ratio > 0.0 && eps_min_ratio < 1.0)) throw ConfigError("eps_min_ratio must lie in (0, 1)");
    if (num_reads < 1) throw ConfigError("num_reads must be at least 1");
    if (!(annealing_time_us > 0.0)) throw ConfigError("annealing time must be positive");
}

QuadraticForm FunctionObjective::block_model(std::size_t, const Eigen::VectorXd& v) {
    QuadraticForm q;
    q.gradient = f_.gradient(v);
    const Eigen::MatrixXd h = f_.hessian(v);
    q.hessian = (0.5 * (h + h.transpose())).sparseView();
    return q;
}

SmoothFunction augment(const SmoothFunction& objective, const std::vector<PenaltyConstraint>& equalities,
                       const std::vector<PenaltyConstraint>& inequalities) {
    for (const auto& c : equalities) {
        if (!(c.penalty > 0.0)) throw InvalidArgumentError("penalty factors must be positive");
    }
    for (const auto& c : inequalities) {
        if (!(c.penalty > 0.0)) throw InvalidArgumentError("penalty factors must be positive");
    }
    if (equalities.empty() && inequalities.empty()) return objective;

    const auto nw = static_cast<Eigen::Index>(objective.size);
    const auto nl = static_cast<Eigen::Index>(inequalities.size());
    SmoothFunction out;
    out.size = objective.size + inequalities.size();

    out.value = [=](const Eigen::VectorXd& v) {
        const Eigen::VectorXd w = v.head(nw);
        double f = objective.value(w);
        for (const auto& c : equalities) {
            const double h = c.value(w);
            f += c.penalty * h * h;
        }
        for (Eigen::Index j = 0; j < nl; ++j) {
            const auto& c = inequalities[static_cast<std::size_t>(j)];
            const double r = c.value(w) + v(nw + j);
            f += c.penalty * r * r;
        }
        return f;
    };
    out.gradient = [=](const Eigen::VectorXd& v) {
        const Eigen::VectorXd w = v.head(nw);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(nw + nl);
        g.head(nw) = objective.gradient(w);
        for (const auto& c : equalities) g.head(nw) += 2.0 * c.penalty * c.value(w) * c.gradient(w);
        for (Eigen::Index j = 0; j < nl; ++j) {
            const auto& c = inequalities[static_cast<std::size_t>(j)];
            const double r = c.value(w) + v(nw + j);
            g.head(nw) += 2.0 * c.penalty * r * c.gradient(w);
            g(nw + j) = 2.0 * c.penalty * r;
        }
        return g;
    };
    out.hessian = [=](const Eigen::VectorXd& v) {
        const Eigen::VectorXd w = v.head(nw);
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(nw + nl, nw + nl);
        h.topLeftCorner(nw, nw) = objective.hessian(w);
        for (const auto& c : equalities) {
            const Eigen::VectorXd dh = c.gradient(w);
            h.topLeftCorner(nw, nw) += 2.0 * c.penalty * (dh * dh.transpose() + c.value(w) * c.hessian(w));
        }
        for (Eigen::Index j = 0; j < nl; ++j) {
            const auto& c = inequalities[static_cast<std::size_t>(j)];
            const double r = c.value(w) + v(nw + j);
            const Eigen::VectorXd dl = c.gradient(w);
            h.topLeftCorner(nw, nw) += 2.0 * c.penalty * (dl * dl.transpose() + r * c.hessian(w));
            h.block(0, nw + j, nw, 1) = 2.0 * c.penalty * dl;
            h.block(nw + j, 0, 1, nw) = 2.0 * c.penalty * dl.transpose();
            h(nw + j, nw + j) = 2.0 * c.penalty;
        }
        return h;
    };
    return out;
}

void augment_bounds(Eigen::VectorXd& lower, Eigen::VectorXd& upper, std::size_t num_inequalities, double aux_upper) {
    const auto n = lower.size();
    const auto m = static_cast<Eigen::Index>(num_inequalities);
    lower.conservativeResize(n + m);
    upper.conservativeResize(n + m);
    lower.tail(m).setZero();
    upper.tail(m).setConstant(aux_upper);
}

void RelativeChange::observe_reference(double value) {
    if (reference_ == 0.0 && value != 0.0) reference_ = std::abs(value);
}

double RelativeChange::operator()(double previous, double current) {
    observe_reference(previous);
    observe_reference(current);
    if (reference_ == 0.0) return 0.0;
    return std::abs((current - previous) / reference_);
}

namespace {

struct BlockRun {
    VariableBlock range;
    std::uint64_t id = 0;
    Eigen::VectorXd v;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    Eigen::VectorXd eps;
    Eigen::VectorXd eps_min;
    double value = 0.0;
    QuadraticForm model;
    RelativeChange change{0.0};
    int successes = 0;
    int failures = 0;
    int iterations = 0;
    bool active = true;
    BinaryEncoding encoding{1, Eigen::VectorXd(), Eigen::VectorXd()};
};

double checked(double value) {
    if (!std::isfinite(value)) throw NumericError("objective evaluated to a non-finite value");
    return value;
}

/// Strict decrease beyond rounding noise.
bool decreases(double value, double current) {
    const double noise = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(value), std::abs(current));
    return value < current - noise;
}

void check_model(const QuadraticForm& q) {
    if (!q.gradient.allFinite()) throw NumericError("objective gradient is not finite");
    for (Eigen::Index k = 0; k < q.hessian.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(q.hessian, k); it; ++it) {
            if (!std::isfinite(it.value())) throw NumericError("objective Hessian is not finite");
        }
    }
}

}  // namespace

SqpResult qa_sqp_minimize(SqpObjective& objective, const Eigen::VectorXd& v0, const Eigen::VectorXd& lower,
                          const Eigen::VectorXd& upper, const Eigen::VectorXd& eps0, const SqpConfig& config,
                          Sampler& sampler, std::uint64_t seed, const std::vector<std::uint64_t>& block_ids) {
    config.validate();
    const auto n = static_cast<Eigen::Index>(objective.size());
    if (v0.size() != n || lower.size() != n || upper.size() != n || eps0.size() != n) {
        throw ContractError("QA-SQP inputs do not match the objective size");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(lower(i) <= v0(i) && v0(i) <= upper(i))) throw ContractError("QA-SQP initial point is infeasible");
        if (!(eps0(i) > 0.0)) throw ContractError("initial discretisation error must be positive");
    }
    const auto ranges = objective.blocks();
    if (!block_ids.empty() && block_ids.size() != ranges.size()) throw ContractError("one block id per block expected");

    std::vector<BlockRun> runs(ranges.size());
    double total = 0.0;
    for (std::size_t b = 0; b < ranges.size(); ++b) {
        auto& r = runs[b];
        r.range = ranges[b];
        r.id = block_ids.empty() ? b : block_ids[b];
        const auto off = static_cast<Eigen::Index>(r.range.offset);
        const auto len = static_cast<Eigen::Index>(r.range.size);
        r.v = v0.segment(off, len);
        r.lower = lower.segment(off, len);
        r.upper = upper.segment(off, len);
        r.eps = eps0.segment(off, len);
        r.eps_min = config.eps_min_ratio * r.eps;
        r.value = checked(objective.block_value(b, r.v));
        r.model = objective.block_model(b, r.v);
        check_model(r.model);
        r.change = RelativeChange(r.value);
        total += r.value;
    }

    SqpResult result;
    RelativeChange total_change(total);
    const int L = config.qubits;
    int iteration = 0;

    auto any_active = [&] {
        for (const auto& r : runs) {
            if (r.active) return true;
        }
        return false;
    };

    while (any_active()) {
        QuboProblem combined;
        combined.num_reads = config.num_reads;
        combined.annealing_time_us = config.annealing_time_us;
        combined.seed = seed;
        std::vector<std::size_t> order;
        for (std::size_t b = 0; b < runs.size(); ++b) {
            auto& r = runs[b];
            if (!r.active) continue;
            Eigen::VectorXd base(r.v.size());
            for (Eigen::Index i = 0; i < r.v.size(); ++i) {
                const BoundUpdate u = update_bounds(r.v(i), r.lower(i), r.upper(i), r.eps(i), L);
                r.eps(i) = u.eps;
                base(i) = u.z_min;
            }
            r.encoding = BinaryEncoding(L, r.eps, base);
            Qubo q = build_qubo(r.model, r.encoding);
            const std::size_t offset = combined.size;
            for (const auto& e : q.problem.entries) combined.entries.push_back({e.i + offset, e.j + offset, e.value});
            combined.blocks.push_back({offset, q.problem.size, derive_seed(seed, r.id, static_cast<std::uint64_t>(r.iterations))});
            combined.size += q.problem.size;
            order.push_back(b);
        }
        const Bits bits = sampler.sample(combined).best().bits;

        int accepted = 0;
        double new_total = 0.0;
        std::size_t cursor = 0;
        for (const std::size_t b : order) {
            auto& r = runs[b];
            const std::size_t nbits = r.encoding.num_bits();
            const Bits slice(bits.begin() + static_cast<std::ptrdiff_t>(cursor),
                             bits.begin() + static_cast<std::ptrdiff_t>(cursor + nbits));
            cursor += nbits;
            const Eigen::VectorXd candidate = r.v + r.encoding.decode(slice);
            const double value = checked(objective.block_value(b, candidate));
            ++r.iterations;
            bool converged = false;
            if (decreases(value, r.value)) {
                ++r.successes;
                ++accepted;
                converged = r.change(r.value, value) <= config.tolerance;
                r.v = candidate;
                r.value = value;
                r.model = objective.block_model(b, r.v);
                check_model(r.model);
            } else {
                ++r.failures;
                r.eps = (config.shrink * r.eps).cwiseMax(r.eps_min);
            }
            if (converged || r.successes >= config.max_steps || r.failures >= config.max_failed ||
                (config.max_iterations > 0 && r.iterations >= config.max_iterations)) {
                r.active = false;
            }
        }
        for (const auto& r : runs) new_total += r.value;
        ++iteration;
        result.trace.push_back({iteration, new_total, total_change(total, new_total), accepted});
        total = new_total;
    }

    result.v = v0;
    result.value = total;
    result.iterations = iteration;
    for (const auto& r : runs) {
        result.v.segment(static_cast<Eigen::Index>(r.range.offset), static_cast<Eigen::Index>(r.range.size)) = r.v;
        result.successes += r.successes;
        result.failures += r.failures;
    }
    return result;
}

}  // namespace qafem
