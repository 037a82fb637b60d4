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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qafem/assembly.hpp"
#include "qafem/errors.hpp"
#include "qafem/qasqp.hpp"

namespace qafem {

struct DoubleMinConfig {
    SqpConfig displacement;
    SqpConfig internal;
    double tolerance = 1e-9;  // outer |(Phi_U - Phi_Q) / Phi_U0|
    int max_outer = 200;
    /// Initial solution intervals. A non-positive displacement interval means
    /// "derive from the step".
    double displacement_interval = 0.0;
    double dgamma_interval = 1e-2;
    double alpha_interval = 1.224744871391589;
    double alpha_bound = 1.224744871391589;

    DoubleMinConfig();
    void validate() const;
};

/// One line of the convergence trace. Phase "U" and "Q" records are inner
/// iterations; phase "outer" closes an outer iteration.
struct TraceRecord {
    int step = 0;
    int outer = 0;
    std::string phase;
    int inner = 0;
    double phi = 0.0;
    double relative_error = 0.0;
};

struct StepResult {
    Eigen::VectorXd displacement;  // full
    Eigen::VectorXd internal;
    History history;               // committed at n+1
    std::vector<TraceRecord> trace;
    int outer_iterations = 0;
    double outer_error = 0.0;
    double phi = 0.0;
    std::vector<int> displacement_iterations;  // per outer iteration
    std::vector<int> internal_iterations;
    double final_inner_error = 0.0;           // last accepted U-phase relative change
};

class NonConvergenceError : public Error {
 public:
    NonConvergenceError(const std::string& what, std::vector<TraceRecord> trace)
        : Error(what), trace_(std::move(trace)) {}
    const std::vector<TraceRecord>& trace() const noexcept { return trace_; }

 private:
    std::vector<TraceRecord> trace_;
};

/// Displacement half: the incremental potential over the free dofs with the
/// internal variables frozen.
class DisplacementObjective : public SqpObjective {
 public:
    DisplacementObjective(const Structure& structure, const Eigen::VectorXd& q, const History& history,
                          const Eigen::VectorXd& f_ext);
    std::size_t size() const override { return structure_.dofs().num_free(); }
    double block_value(std::size_t, const Eigen::VectorXd& v) override;
    QuadraticForm block_model(std::size_t, const Eigen::VectorXd& v) override;

 private:
    const Structure& structure_;
    const Eigen::VectorXd& q_;
    const History& history_;
    const Eigen::VectorXd& f_ext_;
    Eigen::VectorXd prescribed_;
};

/// Internal-variable half: one independent block per quadrature point with
/// the displacements frozen. Block values are weighted local functionals.
class InternalObjective : public SqpObjective {
 public:
    InternalObjective(const Structure& structure, const Eigen::VectorXd& displacement, const History& history);
    std::size_t size() const override { return structure_.dofs().num_q(); }
    std::vector<VariableBlock> blocks() const override;
    double block_value(std::size_t block, const Eigen::VectorXd& v) override;
    QuadraticForm block_model(std::size_t block, const Eigen::VectorXd& v) override;

 private:
    LocalUnknowns unknowns(const Eigen::VectorXd& v) const;

    const Structure& structure_;
    const History& history_;
    std::vector<Eigen::Matrix3d> strains_;
};

/// Bounds and initial discretisation errors of the internal variables.
void internal_bounds(const Structure& structure, const DoubleMinConfig& config, Eigen::VectorXd& lower,
                     Eigen::VectorXd& upper, Eigen::VectorXd& eps0);

/// Points with no plastic increment get the elastic-predictor normal (this
/// leaves the potential unchanged); others keep their current normal.
void refresh_normals(const Structure& structure, const Eigen::VectorXd& displacement, const History& history,
                     const DoubleMinConfig& config, Eigen::VectorXd& q);

/// Alternating minimisation over displacements and internal variables for
/// one load step. The structure's Dirichlet values must already hold the
/// values at n+1.
StepResult double_minimize(const Structure& structure, const Eigen::VectorXd& f_ext, const History& history,
                           const DoubleMinConfig& config, Sampler& displacement_sampler, Sampler& internal_sampler,
                           std::uint64_t seed, int step = 1);

}  // namespace qafem
