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

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qafem/config.hpp"
#include "qafem/double_minimization.hpp"
#include "qafem/oracle.hpp"
#include "qafem/sampler.hpp"

namespace qafem {

std::unique_ptr<Sampler> create_sampler(const std::string& backend, const SamplerSettings& settings);

struct BarRealisation {
    StepResult step;
    Eigen::VectorXd node_x;
    Eigen::VectorXd point_x;
    Eigen::VectorXd gamma;         // per quadrature point
    Eigen::VectorXd strain;        // eps_xx per quadrature point
    double tip = 0.0;              // u_x at x = l
    double l2_error = 0.0;         // relative L2 error of nodal u_x; NaN without a closed form
    double transition = 0.0;       // last point with gamma > 1e-8, 0 if none
};

struct BarReport {
    std::optional<BarSolution> analytic;
    std::vector<BarRealisation> runs;
};

/// Uniaxial-strain bar under a constant body force, solved in one increment.
/// Writes fields.csv, convergence.csv and summary.txt when `write` is set.
BarReport run_bar1d(const RunConfig& config, bool write = true, std::ostream* log = nullptr);

struct PlateStep {
    double time = 0.0;
    double displacement = 0.0;  // prescribed right-edge u_x
    double force = 0.0;         // x-resultant through the plate
    double force_reference = 0.0;
    double force_elastic = 0.0;
    Eigen::VectorXd gamma;
    Eigen::VectorXd gamma_reference;
    Eigen::VectorXd field;      // full displacement
    int outer_iterations = 0;
    double outer_error = 0.0;
};

struct PlateReport {
    double amplitude = 0.0;
    bool has_reference = false;
    Eigen::MatrixXd point_xy;   // num_points x 2
    std::vector<PlateStep> steps;
};

/// Plane-strain plate under a prescribed cyclic right-edge displacement.
/// Writes reaction_force.csv, gamma snapshots (CSV and VTK), convergence.csv
/// and summary.txt when `write` is set.
PlateReport run_plate2d(const RunConfig& config, bool write = true, std::ostream* log = nullptr);

/// Default cyclic amplitude: three plane-strain uniaxial yield strains over the width.
double default_plate_amplitude(const Material& material, double width);
/// Right-edge displacement at time t.
double plate_displacement(const PlateSettings& plate, double amplitude, double t);

/// QUBO in the bridge request layout: {"n": K, "entries": [[i, j, v]...]},
/// optionally with num_reads, annealing_time_us and seed, or a bare entries
/// array. Missing request parameters come from `defaults`. Parse failures
/// raise ConfigError with line and column.
QuboProblem parse_qubo(const std::string& text, const QuboProblem& defaults = {});
QuboProblem read_qubo_file(const std::string& path, const QuboProblem& defaults = {});

/// Solve a QUBO file and print "bits... energy" on one line.
Sample run_qubo_file(const RunConfig& config, std::ostream& out);

}  // namespace qafem
