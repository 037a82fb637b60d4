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

#include "qafem/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "qafem/errors.hpp"

namespace qafem {

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::bar1d: return "bar1d";
        case Scenario::plate2d: return "plate2d";
        case Scenario::qubo_file: return "qubo-file";
    }
    return "unknown";
}

Scenario scenario_from_string(const std::string& name) {
    if (name == "bar1d") return Scenario::bar1d;
    if (name == "plate2d") return Scenario::plate2d;
    if (name == "qubo-file") return Scenario::qubo_file;
    throw ConfigError("unknown scenario '" + name + "' (expected bar1d, plate2d or qubo-file)");
}

Material bar_material() {
    Material m;
    m.elastic = ElasticParams::from_young_poisson(2000.0, 0.3);
    m.hardening = HardeningLaw::linear(70.0, 20.0);
    return m;
}

Material plate_material() {
    Material m;
    m.elastic = ElasticParams::from_young_poisson(20000.0, 0.3);
    m.hardening = HardeningLaw::swift(150.0, 0.05, 0.1);
    return m;
}

RunConfig default_config(Scenario scenario) {
    RunConfig c;
    c.scenario = scenario;
    c.material = scenario == Scenario::plate2d ? plate_material() : bar_material();
    if (scenario == Scenario::plate2d) {
        c.solver.tolerance = 1e-8;
        c.solver.displacement.tolerance = 1e-10;
        c.solver.displacement.max_iterations = 40;
    }
    c.sync();
    return c;
}

void RunConfig::sync() {
    for (auto* s : {&solver.displacement, &solver.internal}) {
        s->num_reads = sampler.num_reads;
        s->annealing_time_us = sampler.annealing_time_us;
    }
}

void RunConfig::validate() const {
    if (repeats < 1) throw ConfigError("repeats must be at least 1");
    if (output.empty()) throw ConfigError("output directory must not be empty");
    solver.validate();
    if (sampler.num_reads < 1) throw ConfigError("sampler.num_reads must be at least 1");
    if (!(sampler.annealing_time_us > 0.0)) throw ConfigError("sampler.annealing_time_us must be positive");
    for (const auto& b : {sampler.backend, sampler.internal_backend}) {
        if (b != "sa" && b != "exhaustive" && b != "bridge") {
            throw ConfigError("unknown sampler backend '" + b + "' (expected sa, exhaustive or bridge)");
        }
        if (b == "bridge" && sampler.bridge_command.empty()) throw ConfigError("bridge backend needs sampler.bridge_command");
    }
    if (!(sampler.timeout_s > 0.0)) throw ConfigError("sampler.timeout_s must be positive");
    switch (scenario) {
        case Scenario::bar1d:
            if (!(bar.length > 0.0)) throw ConfigError("bar.length must be positive");
            if (bar.elements < 1) throw ConfigError("bar.elements must be at least 1");
            if (!(bar.body_force >= 0.0)) throw ConfigError("bar.body_force must be non-negative");
            break;
        case Scenario::plate2d: {
            if (!(plate.width > 0.0) || !(plate.height > 0.0)) throw ConfigError("plate dimensions must be positive");
            if (plate.nx < 1 || plate.ny < 1) throw ConfigError("plate.nx and plate.ny must be at least 1");
            if (plate.times.empty()) throw ConfigError("plate.times must not be empty");
            double last = 0.0;
            for (double t : plate.times) {
                if (!(t > last)) throw ConfigError("plate.times must be strictly increasing and positive");
                last = t;
            }
            if (!plate.path.empty()) {
                if (plate.path.front().first != 0.0) throw ConfigError("plate.path must start at t = 0");
                for (std::size_t k = 1; k < plate.path.size(); ++k) {
                    if (!(plate.path[k].first > plate.path[k - 1].first)) {
                        throw ConfigError("plate.path times must be strictly increasing");
                    }
                }
                if (plate.times.back() > plate.path.back().first) throw ConfigError("plate.times extend beyond plate.path");
            }
            break;
        }
        case Scenario::qubo_file:
            if (qubo_path.empty()) throw ConfigError("qubo-file scenario needs a QUBO file path");
            break;
    }
}

// ---------------------------------------------------------------------------

namespace {

std::string where(const YAML::Node& node) {
    const auto m = node.Mark();
    if (m.is_null()) return "";
    return "line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ": ";
}

void check_keys(const YAML::Node& node, const std::string& section, const std::set<std::string>& allowed) {
    if (!node.IsMap()) throw ConfigError(where(node) + "'" + section + "' must be a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) {
            throw ConfigError(where(kv.first) + "unknown key '" + key + "' in " +
                              (section.empty() ? std::string("top level") : "'" + section + "'"));
        }
    }
}

template <class T>
void read(const YAML::Node& parent, const char* key, T& out) {
    const YAML::Node n = parent[key];
    if (!n) return;
    try {
        out = n.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(where(n) + "bad value for '" + key + "'");
    }
}

struct MaterialFields {
    double young, poisson, yield, modulus = 20.0, gamma0 = 0.05, exponent = 0.1, penalty;
    std::string law;
};

MaterialFields fields_of(const Material& m) {
    MaterialFields f{};
    f.young = m.elastic.young;
    f.poisson = m.elastic.poisson;
    f.yield = m.hardening.yield_stress();
    f.penalty = m.penalty;
    if (m.hardening.is_linear()) {
        f.law = "linear";
        f.modulus = std::get<LinearHardening>(m.hardening.law()).modulus;
        f.gamma0 = 0.05;
        f.exponent = 0.1;
    } else {
        f.law = "swift";
        const auto& sw = std::get<SwiftHardening>(m.hardening.law());
        f.gamma0 = sw.gamma0;
        f.exponent = sw.exponent;
        f.modulus = 0.0;
    }
    return f;
}

Material material_of(const MaterialFields& f, const YAML::Node& node) {
    try {
        Material m;
        m.elastic = ElasticParams::from_young_poisson(f.young, f.poisson);
        if (f.law == "linear") {
            m.hardening = HardeningLaw::linear(f.yield, f.modulus);
        } else if (f.law == "swift") {
            m.hardening = HardeningLaw::swift(f.yield, f.gamma0, f.exponent);
        } else {
            throw ConfigError("unknown hardening law '" + f.law + "' (expected linear or swift)");
        }
        m.penalty = f.penalty;
        return m;
    } catch (const InvalidArgumentError& e) {
        throw ConfigError(where(node) + "material: " + e.what());
    }
}

RunConfig from_yaml(const YAML::Node& root) {
    if (!root || root.IsNull()) throw ConfigError("configuration is empty");
    check_keys(root, "", {"scenario", "seed", "repeats", "output", "material", "bar", "plate", "solver", "sampler", "qubo"});
    std::string scenario = "bar1d";
    read(root, "scenario", scenario);
    RunConfig c = default_config(scenario_from_string(scenario));
    read(root, "seed", c.seed);
    read(root, "repeats", c.repeats);
    read(root, "output", c.output);

    if (const auto m = root["material"]) {
        check_keys(m, "material", {"young", "poisson", "yield_stress", "hardening", "modulus", "gamma0", "exponent", "penalty"});
        MaterialFields f = fields_of(c.material);
        read(m, "young", f.young);
        read(m, "poisson", f.poisson);
        read(m, "yield_stress", f.yield);
        read(m, "hardening", f.law);
        read(m, "modulus", f.modulus);
        read(m, "gamma0", f.gamma0);
        read(m, "exponent", f.exponent);
        read(m, "penalty", f.penalty);
        c.material = material_of(f, m);
    }
    if (const auto b = root["bar"]) {
        check_keys(b, "bar", {"length", "elements", "body_force", "mesh"});
        read(b, "length", c.bar.length);
        read(b, "elements", c.bar.elements);
        read(b, "body_force", c.bar.body_force);
        read(b, "mesh", c.bar.mesh_file);
    }
    if (const auto p = root["plate"]) {
        check_keys(p, "plate", {"width", "height", "nx", "ny", "amplitude", "path", "times", "snapshots", "reference", "mesh"});
        read(p, "width", c.plate.width);
        read(p, "height", c.plate.height);
        read(p, "nx", c.plate.nx);
        read(p, "ny", c.plate.ny);
        read(p, "amplitude", c.plate.amplitude);
        read(p, "times", c.plate.times);
        read(p, "snapshots", c.plate.snapshots);
        read(p, "reference", c.plate.reference);
        read(p, "mesh", c.plate.mesh_file);
        if (const auto path = p["path"]) {
            if (!path.IsSequence()) throw ConfigError(where(path) + "'path' must be a list of [t, u] pairs");
            c.plate.path.clear();
            for (const auto& point : path) {
                if (!point.IsSequence() || point.size() != 2) throw ConfigError(where(point) + "path entries must be [t, u] pairs");
                try {
                    c.plate.path.emplace_back(point[0].as<double>(), point[1].as<double>());
                } catch (const YAML::Exception&) {
                    throw ConfigError(where(point) + "path entries must be numbers");
                }
            }
        }
    }
    if (const auto s = root["solver"]) {
        check_keys(s, "solver", {"qubits", "shrink", "max_steps", "max_failed", "max_iterations", "tolerance",
                                 "outer_tolerance", "max_outer", "internal_max_steps", "internal_max_failed",
                                 "internal_max_iterations", "internal_tolerance", "displacement_interval",
                                 "dgamma_interval", "alpha_interval"});
        auto& d = c.solver.displacement;
        auto& q = c.solver.internal;
        if (s["qubits"]) {
            read(s, "qubits", d.qubits);
            q.qubits = d.qubits;
        }
        if (s["shrink"]) {
            read(s, "shrink", d.shrink);
            q.shrink = d.shrink;
        }
        read(s, "max_steps", d.max_steps);
        read(s, "max_failed", d.max_failed);
        read(s, "max_iterations", d.max_iterations);
        read(s, "tolerance", d.tolerance);
        read(s, "internal_max_steps", q.max_steps);
        read(s, "internal_max_failed", q.max_failed);
        read(s, "internal_max_iterations", q.max_iterations);
        read(s, "internal_tolerance", q.tolerance);
        read(s, "outer_tolerance", c.solver.tolerance);
        read(s, "max_outer", c.solver.max_outer);
        read(s, "displacement_interval", c.solver.displacement_interval);
        read(s, "dgamma_interval", c.solver.dgamma_interval);
        read(s, "alpha_interval", c.solver.alpha_interval);
    }
    if (const auto s = root["sampler"]) {
        check_keys(s, "sampler", {"backend", "internal_backend", "num_reads", "annealing_time_us", "bridge_command", "timeout_s"});
        read(s, "backend", c.sampler.backend);
        read(s, "internal_backend", c.sampler.internal_backend);
        read(s, "num_reads", c.sampler.num_reads);
        read(s, "annealing_time_us", c.sampler.annealing_time_us);
        read(s, "bridge_command", c.sampler.bridge_command);
        read(s, "timeout_s", c.sampler.timeout_s);
    }
    if (const auto q = root["qubo"]) {
        check_keys(q, "qubo", {"path"});
        read(q, "path", c.qubo_path);
    }
    c.sync();
    return c;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError("line " + std::to_string(e.mark.line + 1) + ", column " + std::to_string(e.mark.column + 1) +
                          ": " + e.msg);
    }
    return from_yaml(root);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    RunConfig c;
    try {
        c = parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
    const auto base = std::filesystem::path(path).parent_path();
    for (std::string* file : {&c.bar.mesh_file, &c.plate.mesh_file, &c.qubo_path}) {
        if (!file->empty() && std::filesystem::path(*file).is_relative()) *file = (base / *file).lexically_normal().string();
    }
    return c;
}

}  // namespace qafem
