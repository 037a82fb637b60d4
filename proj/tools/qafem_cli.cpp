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

// qafem: run the bar and plate benchmarks or solve a QUBO file.

#include <algorithm>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qafem/config.hpp"
#include "qafem/errors.hpp"
#include "qafem/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kConfig = 2;
constexpr int kNonConvergence = 3;
constexpr int kTransport = 4;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Elasto-plastic finite elements solved by QUBO-based sequential quadratic programming"};
    std::optional<std::string> config_path, scenario, sampler, out, qubo;
    std::optional<int> elements, qubits, num_reads, max_steps, max_failed, repeats;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol, outer_tol, xi, body_force;
    bool quiet = false;

    app.add_option("--config", config_path, "YAML run file")->check(CLI::ExistingFile);
    app.add_option("--scenario", scenario, "bar1d | plate2d | qubo-file");
    app.add_option("--elements", elements, "bar elements (plate: nx, with ny = nx / 2)");
    app.add_option("--qubits", qubits, "qubits per variable");
    app.add_option("--sampler", sampler, "sa | exhaustive | bridge (displacement half and QUBO files)");
    app.add_option("--num-reads", num_reads, "reads per QUBO");
    app.add_option("--seed", seed, "base seed");
    app.add_option("--tol", tol, "inner relative-change tolerance");
    app.add_option("--outer-tol", outer_tol, "outer relative-error tolerance");
    app.add_option("--xi", xi, "discretisation-error shrink factor on failure");
    app.add_option("--max-steps", max_steps, "successful iterations per minimisation");
    app.add_option("--max-failed", max_failed, "failed iterations per minimisation");
    app.add_option("--out", out, "output directory");
    app.add_option("--repeats", repeats, "independent realisations (bar1d)");
    app.add_option("--body-force", body_force, "bar body force b0 in MPa/mm");
    app.add_option("--qubo", qubo, "QUBO file for the qubo-file scenario");
    app.add_flag("--quiet", quiet, "no progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        qafem::RunConfig config;
        if (config_path) {
            config = qafem::load_config(*config_path);
        } else {
            config = qafem::default_config(scenario ? qafem::scenario_from_string(*scenario) : qafem::Scenario::bar1d);
        }
        if (scenario) config.scenario = qafem::scenario_from_string(*scenario);
        if (qubo) {
            config.qubo_path = *qubo;
            if (!scenario && !config_path) config.scenario = qafem::Scenario::qubo_file;
        }
        if (elements) {
            config.bar.elements = *elements;
            config.plate.nx = *elements;
            config.plate.ny = std::max(1, *elements / 2);
        }
        if (qubits) config.solver.displacement.qubits = config.solver.internal.qubits = *qubits;
        if (sampler) config.sampler.backend = *sampler;
        if (num_reads) config.sampler.num_reads = *num_reads;
        if (seed) config.seed = *seed;
        if (tol) config.solver.displacement.tolerance = *tol;
        if (outer_tol) config.solver.tolerance = *outer_tol;
        if (xi) config.solver.displacement.shrink = config.solver.internal.shrink = *xi;
        if (max_steps) config.solver.displacement.max_steps = *max_steps;
        if (max_failed) config.solver.displacement.max_failed = *max_failed;
        if (out) config.output = *out;
        if (repeats) config.repeats = *repeats;
        if (body_force) config.bar.body_force = *body_force;
        config.sync();
        config.validate();

        std::ostream* log = quiet ? nullptr : &std::cerr;
        switch (config.scenario) {
            case qafem::Scenario::bar1d:
                qafem::run_bar1d(config, true, log);
                break;
            case qafem::Scenario::plate2d:
                qafem::run_plate2d(config, true, log);
                break;
            case qafem::Scenario::qubo_file:
                qafem::run_qubo_file(config, std::cout);
                break;
        }
        if (log && config.scenario != qafem::Scenario::qubo_file) *log << "results in " << config.output << '\n';
        return kOk;
    } catch (const qafem::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const qafem::InvalidArgumentError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const qafem::MeshQualityError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const qafem::NonConvergenceError& e) {
        std::cerr << "not converged: " << e.what() << '\n';
        return kNonConvergence;
    } catch (const qafem::TransportError& e) {
        std::cerr << "sampler transport error: " << e.what() << '\n';
        return kTransport;
    } catch (const qafem::ProtocolError& e) {
        std::cerr << "sampler protocol error: " << e.what() << '\n';
        return kTransport;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}
