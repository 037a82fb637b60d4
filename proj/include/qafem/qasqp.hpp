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

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "qafem/encoding.hpp"
#include "qafem/sampler.hpp"

namespace qafem {

struct SqpConfig {
    int qubits = 3;             // L
    double shrink = 0.5;        // xi
    int max_steps = 500;        // N_steps
    int max_failed = 60;        // N_failed
    int max_iterations = 0;     // 0: no cap beyond N_steps + N_failed
    double tolerance = 1e-12;   // inner |(f - f_prev) / f_0|
    double eps_min_ratio = 1e-14;  // eps_min = ratio * eps_0
    int num_reads = 100;
    double annealing_time_us = 20.0;

    void validate() const;
};

/// Independent group of variables. The objective is the sum of block values.
struct VariableBlock {
    std::size_t offset = 0;
    std::size_t size = 0;
};

/// Objective for QA-SQP, evaluated block by block on block-local vectors.
class SqpObjective {
 public:
    virtual ~SqpObjective() = default;
    virtual std::size_t size() const = 0;
    /// Defaults to a single block spanning every variable.
    virtual std::vector<VariableBlock> blocks() const { return {{0, size()}}; }
    virtual double block_value(std::size_t block, const Eigen::VectorXd& v) = 0;
    /// Gradient and Hessian at v.
    virtual QuadraticForm block_model(std::size_t block, const Eigen::VectorXd& v) = 0;
};

/// Twice-differentiable function with dense derivatives.
struct SmoothFunction {
    std::size_t size = 0;
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
};

/// Single-block objective wrapping a SmoothFunction.
class FunctionObjective : public SqpObjective {
 public:
    explicit FunctionObjective(SmoothFunction f) : f_(std::move(f)) {}
    std::size_t size() const override { return f_.size; }
    double block_value(std::size_t, const Eigen::VectorXd& v) override { return f_.value(v); }
    QuadraticForm block_model(std::size_t, const Eigen::VectorXd& v) override;

 private:
    SmoothFunction f_;
};

struct PenaltyConstraint {
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
    double penalty = 1.0;
};

/// f_aug(w, lambda) = f(w) + sum c_j h_j(w)^2 + sum c_j (l_j(w) + lambda_j)^2
/// for equalities h_j = 0 and inequalities l_j <= 0. One auxiliary variable
/// per inequality is appended after w.
SmoothFunction augment(const SmoothFunction& objective, const std::vector<PenaltyConstraint>& equalities,
                       const std::vector<PenaltyConstraint>& inequalities);

/// Box bounds for the augmented variables: the given bounds on w followed by
/// [0, aux_upper] for every auxiliary variable.
void augment_bounds(Eigen::VectorXd& lower, Eigen::VectorXd& upper, std::size_t num_inequalities,
                    double aux_upper = std::numeric_limits<double>::infinity());

struct SqpIterate {
    int iteration = 0;
    double value = 0.0;
    double relative_error = 0.0;
    int accepted = 0;  // blocks that accepted their step
};

struct SqpResult {
    Eigen::VectorXd v;
    double value = 0.0;
    int iterations = 0;
    int successes = 0;  // summed over blocks
    int failures = 0;
    std::vector<SqpIterate> trace;
};

/// Relative change |(f - f_prev) / f_0| with f_0 the first non-zero
/// reference value seen; zero while no reference exists.
class RelativeChange {
 public:
    explicit RelativeChange(double initial) { observe_reference(initial); }
    double operator()(double previous, double current);

 private:
    void observe_reference(double value);
    double reference_ = 0.0;
};

/// QA-SQP: sequential quadratic steps solved as QUBOs. Every block of the objective runs its own loop with
/// its own eps, acceptance and counters; the blocks advance in lockstep and
/// the QUBOs of all active blocks go to the sampler as one block-diagonal
/// problem. Block b at its k-th iteration uses the seed
/// derive_seed(seed, block_ids[b], k), so solving blocks one at a time gives
/// bitwise the same result as solving them together. A step is accepted
/// only when it lowers the block value by more than rounding noise.
SqpResult qa_sqp_minimize(SqpObjective& objective, const Eigen::VectorXd& v0, const Eigen::VectorXd& lower,
                          const Eigen::VectorXd& upper, const Eigen::VectorXd& eps0, const SqpConfig& config,
                          Sampler& sampler, std::uint64_t seed, const std::vector<std::uint64_t>& block_ids = {});

}  // namespace qafem
