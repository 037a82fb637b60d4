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
#include <utility>
#include <vector>

#include "qafem/double_minimization.hpp"
#include "qafem/material.hpp"

namespace qafem {

enum class Scenario { bar1d, plate2d, qubo_file };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

struct BarSettings {
    double length = 1.0;       // mm
    int elements = 20;
    double body_force = 100.0;  // b0, MPa/mm
    std::string mesh_file;     // optional; replaces the generated mesh
};

struct PlateSettings {
    double width = 1.0;   // mm
    double height = 0.5;  // mm
    int nx = 8;
    int ny = 4;
    /// Peak right-edge displacement; non-positive selects three times the
    /// plane-strain uniaxial yield strain times the width.
    double amplitude = 0.0;
    /// Piecewise-linear schedule (t, u); empty selects 0 -> +A at t=0.5 -> -A at t=1.
    std::vector<std::pair<double, double>> path;
    std::vector<double> times{0.25, 0.5, 0.75, 1.0};
    std::vector<double> snapshots{0.5, 1.0};
    bool reference = true;  // run the Newton reference alongside
    std::string mesh_file;
};

struct SamplerSettings {
    std::string backend = "sa";               // displacement half: sa | exhaustive | bridge
    std::string internal_backend = "exhaustive";  // internal-variable half
    int num_reads = 100;
    double annealing_time_us = 20.0;
    std::vector<std::string> bridge_command;
    double timeout_s = 60.0;
};

struct RunConfig {
    Scenario scenario = Scenario::bar1d;
    std::uint64_t seed = 1;
    int repeats = 1;
    std::string output = "out";
    Material material;
    BarSettings bar;
    PlateSettings plate;
    DoubleMinConfig solver;
    SamplerSettings sampler;
    std::string qubo_path;

    /// Throws ConfigError naming the offending field.
    void validate() const;
    /// Copy the sampler read count and annealing time into both solver halves.
    void sync();
};

/// Table-1 (linear hardening) and Table-2 (Swift hardening) materials.
Material bar_material();
Material plate_material();

/// Defaults for a scenario, including its benchmark material. The plate
/// uses an outer tolerance of 1e-8 and at most 40 displacement iterations
/// per outer iteration.
RunConfig default_config(Scenario scenario);

/// Parse a YAML run file. Unknown keys are rejected. Relative mesh and QUBO
/// paths are taken relative to the file.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

}  // namespace qafem
