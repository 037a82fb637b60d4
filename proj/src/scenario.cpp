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

#include "qafem/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <json.hpp>

#include "qafem/errors.hpp"

namespace qafem {

namespace fs = std::filesystem;

std::unique_ptr<Sampler> create_sampler(const std::string& backend, const SamplerSettings& settings) {
    if (backend == "bridge") return std::make_unique<BridgeSampler>(settings.bridge_command, settings.timeout_s);
    return make_sampler(backend);
}

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    return out;
}

void write_trace_header(std::ostream& out) { out << "realisation,step,outer,phase,inner,phi,relative_error\n"; }

void write_trace(std::ostream& out, int realisation, const std::vector<TraceRecord>& trace) {
    for (const auto& r : trace) {
        out << realisation << ',' << r.step << ',' << r.outer << ',' << r.phase << ',' << r.inner << ',' << num(r.phi)
            << ',' << num(r.relative_error) << '\n';
    }
}

Mesh bar_mesh(const RunConfig& config) {
    if (!config.bar.mesh_file.empty()) {
        Mesh m = read_mesh_file(config.bar.mesh_file);
        if (m.dimension() != 1) throw ConfigError("bar mesh must be one-dimensional");
        if (!m.has_node_set("fixed")) throw ConfigError("bar mesh needs a 'fixed' node set");
        return m;
    }
    return build_line_mesh(config.bar.length, static_cast<std::size_t>(config.bar.elements));
}

Mesh plate_mesh(const RunConfig& config) {
    if (!config.plate.mesh_file.empty()) {
        Mesh m = read_mesh_file(config.plate.mesh_file);
        if (m.dimension() != 2) throw ConfigError("plate mesh must be two-dimensional");
        for (const char* set : {"left", "right", "corner"}) {
            if (!m.has_node_set(set)) throw ConfigError(std::string("plate mesh needs a '") + set + "' node set");
        }
        return m;
    }
    return build_grid_mesh(config.plate.width, config.plate.height, static_cast<std::size_t>(config.plate.nx),
                           static_cast<std::size_t>(config.plate.ny));
}

}  // namespace

// ---------------------------------------------------------------------------

BarReport run_bar1d(const RunConfig& config, bool write, std::ostream* log) {
    config.validate();
    const Mesh mesh = bar_mesh(config);
    Structure structure(mesh, config.material, {{"fixed", 0, 0.0}});
    Loads loads;
    loads.body_force = Eigen::Vector2d(config.bar.body_force, 0.0);
    const Eigen::VectorXd f_ext = structure.external_force(loads);

    double length = 0.0;
    for (std::size_t n = 0; n < mesh.num_nodes(); ++n) length = std::max(length, mesh.node(n)[0]);

    BarReport report;
    if (config.material.hardening.is_linear() && config.bar.body_force > 0.0) {
        report.analytic = bar_analytic(config.material, config.bar.body_force, length);
    }

    auto u_sampler = create_sampler(config.sampler.backend, config.sampler);
    auto q_sampler = create_sampler(config.sampler.internal_backend, config.sampler);

    std::ofstream trace_out;
    if (write) {
        trace_out = open_output(config.output, "convergence.csv");
        write_trace_header(trace_out);
    }

    const History start = structure.initial_history();
    for (int r = 1; r <= config.repeats; ++r) {
        BarRealisation run;
        try {
            run.step = double_minimize(structure, f_ext, start, config.solver, *u_sampler, *q_sampler,
                                       derive_seed(config.seed, static_cast<std::uint64_t>(r)), 1);
        } catch (const NonConvergenceError& e) {
            if (write) {
                write_trace(trace_out, r, e.trace());
                trace_out.flush();
            }
            throw;
        }
        if (write) write_trace(trace_out, r, run.step.trace);

        const auto np = static_cast<Eigen::Index>(structure.num_points());
        run.node_x.resize(static_cast<Eigen::Index>(mesh.num_nodes()));
        for (std::size_t n = 0; n < mesh.num_nodes(); ++n) run.node_x(static_cast<Eigen::Index>(n)) = mesh.node(n)[0];
        run.point_x.resize(np);
        run.gamma.resize(np);
        run.strain.resize(np);
        for (std::size_t p = 0; p < structure.num_points(); ++p) {
            const auto i = static_cast<Eigen::Index>(p);
            run.point_x(i) = structure.kinematics(p).x(0);
            run.gamma(i) = run.step.history.points[p].gamma;
            run.strain(i) = structure.point_strain(p, run.step.displacement)(0, 0);
            if (run.gamma(i) > 1e-8) run.transition = std::max(run.transition, run.point_x(i));
        }
        std::size_t tip_node = 0;
        for (std::size_t n = 0; n < mesh.num_nodes(); ++n) {
            if (mesh.node(n)[0] > mesh.node(tip_node)[0]) tip_node = n;
        }
        run.tip = run.step.displacement(static_cast<Eigen::Index>(tip_node));
        run.l2_error = std::numeric_limits<double>::quiet_NaN();
        if (report.analytic) {
            double num2 = 0.0, den2 = 0.0;
            for (Eigen::Index n = 0; n < run.node_x.size(); ++n) {
                const double ua = report.analytic->displacement(run.node_x(n));
                num2 += std::pow(run.step.displacement(n) - ua, 2);
                den2 += ua * ua;
            }
            run.l2_error = std::sqrt(num2 / den2);
        } else if (config.bar.body_force == 0.0) {
            run.l2_error = run.step.displacement.norm();
        }
        if (log) {
            *log << "realisation " << r << ": outer iterations " << run.step.outer_iterations << ", outer error "
                 << num(run.step.outer_error) << ", u(l) " << num(run.tip) << '\n';
        }
        report.runs.push_back(std::move(run));
    }

    if (write) {
        const auto& first = report.runs.front();
        auto out = open_output(config.output, "fields.csv");
        out << "kind,index,x,u_x,u_x_analytic,eps_xx,eps_xx_analytic,gamma,gamma_analytic\n";
        const bool zero = config.bar.body_force == 0.0;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (Eigen::Index n = 0; n < first.node_x.size(); ++n) {
            const double x = first.node_x(n);
            const double ua = report.analytic ? report.analytic->displacement(x) : (zero ? 0.0 : nan);
            out << "node," << n << ',' << num(x) << ',' << num(first.step.displacement(n)) << ',' << num(ua) << ",,,,\n";
        }
        for (Eigen::Index p = 0; p < first.point_x.size(); ++p) {
            const double x = first.point_x(p);
            const double ea = report.analytic ? report.analytic->strain(x) : (zero ? 0.0 : nan);
            const double ga = report.analytic ? report.analytic->gamma(x) : (zero ? 0.0 : nan);
            out << "point," << p << ',' << num(x) << ",,," << num(first.strain(p)) << ',' << num(ea) << ','
                << num(first.gamma(p)) << ',' << num(ga) << '\n';
        }

        auto sum = open_output(config.output, "summary.txt");
        sum << "scenario: bar1d\n";
        sum << "elements: " << mesh.num_elements() << '\n';
        sum << "body_force: " << num(config.bar.body_force) << '\n';
        sum << "qubits: " << config.solver.displacement.qubits << '\n';
        sum << "sampler: " << config.sampler.backend << '\n';
        sum << "seed: " << config.seed << '\n';
        if (report.analytic) {
            sum << "elastic_limit: " << num(report.analytic->elastic_limit()) << '\n';
            sum << "transition_analytic: " << num(report.analytic->transition()) << '\n';
            sum << "tip_analytic: " << num(report.analytic->displacement(length)) << '\n';
        }
        for (std::size_t r = 0; r < report.runs.size(); ++r) {
            const auto& run = report.runs[r];
            int u_its = 0, q_its = 0;
            for (int v : run.step.displacement_iterations) u_its += v;
            for (int v : run.step.internal_iterations) q_its += v;
            sum << "realisation " << r + 1 << ": outer_iterations=" << run.step.outer_iterations
                << " outer_error=" << num(run.step.outer_error) << " inner_error=" << num(run.step.final_inner_error)
                << " displacement_iterations=" << u_its << " internal_iterations=" << q_its
                << " tip=" << num(run.tip) << " l2_error=" << num(run.l2_error)
                << " transition=" << num(run.transition) << '\n';
        }
        if (report.runs.size() > 1) {
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0, mean = 0.0;
            double ilo = lo, ihi = 0.0, imean = 0.0;
            for (const auto& run : report.runs) {
                lo = std::min(lo, run.l2_error);
                hi = std::max(hi, run.l2_error);
                mean += run.l2_error;
                int its = 0;
                for (int v : run.step.displacement_iterations) its += v;
                ilo = std::min(ilo, static_cast<double>(its));
                ihi = std::max(ihi, static_cast<double>(its));
                imean += its;
            }
            const double n = static_cast<double>(report.runs.size());
            sum << "l2_error: min=" << num(lo) << " mean=" << num(mean / n) << " max=" << num(hi) << '\n';
            sum << "displacement_iterations: min=" << num(ilo) << " mean=" << num(imean / n) << " max=" << num(ihi)
                << '\n';
        }
    }
    return report;
}

// ---------------------------------------------------------------------------

double default_plate_amplitude(const Material& material, double width) {
    const double e = material.elastic.young, nu = material.elastic.poisson;
    const double sigma = material.hardening.yield_stress() / std::sqrt(1.0 - nu + nu * nu);
    return 3.0 * sigma * (1.0 - nu * nu) / e * width;
}

double plate_displacement(const PlateSettings& plate, double amplitude, double t) {
    std::vector<std::pair<double, double>> path = plate.path;
    if (path.empty()) path = {{0.0, 0.0}, {0.5, amplitude}, {1.0, -amplitude}};
    if (t <= path.front().first) return path.front().second;
    for (std::size_t k = 1; k < path.size(); ++k) {
        if (t <= path[k].first) {
            const double s = (t - path[k - 1].first) / (path[k].first - path[k - 1].first);
            return path[k - 1].second + s * (path[k].second - path[k - 1].second);
        }
    }
    return path.back().second;
}

namespace {

/// Right-edge x-resultant for a unit right-edge displacement, linear elastic.
double elastic_plate_stiffness(const Structure& structure) {
    const auto& dofs = structure.dofs();
    const auto& mesh = structure.mesh();
    Eigen::VectorXd uc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs.num_full()));
    for (auto n : mesh.node_set("right")) uc(static_cast<Eigen::Index>(2 * n)) = 1.0;
    const Eigen::SparseMatrix<double> k = structure.full_stiffness();
    const Eigen::VectorXd rhs = -dofs.restrict(k * uc);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(structure.stiffness());
    const Eigen::VectorXd uf = solver.solve(rhs);
    const Eigen::VectorXd u = dofs.expand(uf, uc);
    const Eigen::VectorXd f = k * u;
    double sum = 0.0;
    for (auto n : mesh.node_set("right")) sum += f(static_cast<Eigen::Index>(2 * n));
    return sum;
}

std::string time_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "t%.3f", t);
    return buf;
}

void write_vtk(std::ostream& out, const Structure& structure, const PlateStep& step, bool reference) {
    const auto& mesh = structure.mesh();
    out << "# vtk DataFile Version 3.0\n";
    out << "equivalent plastic strain at t = " << num(step.time) << "\n";
    out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.num_nodes() << " double\n";
    for (std::size_t n = 0; n < mesh.num_nodes(); ++n) out << num(mesh.node(n)[0]) << ' ' << num(mesh.node(n)[1]) << " 0\n";
    std::size_t total = 0;
    for (const auto& e : mesh.elements()) total += 1 + e.nodes.size();
    out << "CELLS " << mesh.num_elements() << ' ' << total << '\n';
    for (const auto& e : mesh.elements()) {
        out << e.nodes.size();
        for (auto n : e.nodes) out << ' ' << n;
        out << '\n';
    }
    out << "CELL_TYPES " << mesh.num_elements() << '\n';
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) out << "9\n";
    out << "POINT_DATA " << mesh.num_nodes() << "\nVECTORS displacement double\n";
    for (std::size_t n = 0; n < mesh.num_nodes(); ++n) {
        out << num(step.field(static_cast<Eigen::Index>(2 * n))) << ' ' << num(step.field(static_cast<Eigen::Index>(2 * n + 1)))
            << " 0\n";
    }
    const auto cell_mean = [&](const Eigen::VectorXd& g) {
        std::vector<double> mean(mesh.num_elements(), 0.0);
        std::vector<int> count(mesh.num_elements(), 0);
        for (std::size_t p = 0; p < structure.num_points(); ++p) {
            mean[structure.point_element(p)] += g(static_cast<Eigen::Index>(p));
            ++count[structure.point_element(p)];
        }
        for (std::size_t e = 0; e < mean.size(); ++e) mean[e] /= std::max(1, count[e]);
        return mean;
    };
    out << "CELL_DATA " << mesh.num_elements() << "\nSCALARS gamma double 1\nLOOKUP_TABLE default\n";
    for (double v : cell_mean(step.gamma)) out << num(v) << '\n';
    if (reference) {
        out << "SCALARS gamma_reference double 1\nLOOKUP_TABLE default\n";
        for (double v : cell_mean(step.gamma_reference)) out << num(v) << '\n';
    }
}

}  // namespace

PlateReport run_plate2d(const RunConfig& config, bool write, std::ostream* log) {
    config.validate();
    const Mesh mesh = plate_mesh(config);
    const auto& ps = config.plate;
    PlateReport report;
    report.amplitude = ps.amplitude > 0.0 ? ps.amplitude : default_plate_amplitude(config.material, ps.width);
    report.has_reference = ps.reference;

    std::vector<DirichletCondition> bcs{{"left", 0, 0.0}, {"corner", 1, 0.0}, {"right", 0, 0.0}};
    Structure structure(mesh, config.material, bcs);
    const Eigen::VectorXd f_ext = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(structure.dofs().num_full()));
    const double k_el = elastic_plate_stiffness(structure);

    const auto np = static_cast<Eigen::Index>(structure.num_points());
    report.point_xy.resize(np, 2);
    for (std::size_t p = 0; p < structure.num_points(); ++p) {
        report.point_xy.row(static_cast<Eigen::Index>(p)) = structure.kinematics(p).x.transpose();
    }

    std::vector<NewtonStep> reference;
    if (ps.reference) {
        std::vector<LoadStep> path;
        for (double t : ps.times) {
            LoadStep s;
            s.time = t;
            s.dirichlet = bcs;
            s.dirichlet[2].value = plate_displacement(ps, report.amplitude, t);
            path.push_back(s);
        }
        NewtonOptions opts;
        opts.reaction_set = "right";
        opts.reaction_component = 0;
        reference = newton_fem_reference(mesh, config.material, path, opts);
    }

    auto u_sampler = create_sampler(config.sampler.backend, config.sampler);
    auto q_sampler = create_sampler(config.sampler.internal_backend, config.sampler);
    std::ofstream trace_out;
    if (write) {
        trace_out = open_output(config.output, "convergence.csv");
        write_trace_header(trace_out);
    }

    const std::uint64_t seed = derive_seed(config.seed, 1);
    History history = structure.initial_history();
    for (std::size_t k = 0; k < ps.times.size(); ++k) {
        const double t = ps.times[k];
        const double ux = plate_displacement(ps, report.amplitude, t);
        auto now = bcs;
        now[2].value = ux;
        structure.set_dirichlet_values(now);
        StepResult r;
        try {
            r = double_minimize(structure, f_ext, history, config.solver, *u_sampler, *q_sampler,
                                derive_seed(seed, k + 1), static_cast<int>(k + 1));
        } catch (const NonConvergenceError& e) {
            if (write) {
                write_trace(trace_out, 1, e.trace());
                trace_out.flush();
            }
            throw;
        }
        if (write) write_trace(trace_out, 1, r.trace);

        PlateStep step;
        step.time = t;
        step.displacement = ux;
        step.force = structure.reaction(r.displacement, r.internal, history, "right", 0);
        step.force_elastic = k_el * ux;
        step.field = r.displacement;
        step.gamma.resize(np);
        for (std::size_t p = 0; p < structure.num_points(); ++p) step.gamma(static_cast<Eigen::Index>(p)) = r.history.points[p].gamma;
        step.outer_iterations = r.outer_iterations;
        step.outer_error = r.outer_error;
        if (ps.reference) {
            step.force_reference = reference[k].reaction;
            step.gamma_reference = reference[k].gamma;
        } else {
            step.force_reference = std::numeric_limits<double>::quiet_NaN();
        }
        if (log) {
            *log << "t = " << num(t) << ": u = " << num(ux) << ", force " << num(step.force) << ", outer iterations "
                 << r.outer_iterations << '\n';
        }
        history = r.history;
        report.steps.push_back(std::move(step));
    }

    if (write) {
        auto out = open_output(config.output, "reaction_force.csv");
        out << "time,displacement,force,force_reference,force_elastic\n";
        for (const auto& s : report.steps) {
            out << num(s.time) << ',' << num(s.displacement) << ',' << num(s.force) << ',' << num(s.force_reference)
                << ',' << num(s.force_elastic) << '\n';
        }
        for (const auto& s : report.steps) {
            const bool snap = std::any_of(ps.snapshots.begin(), ps.snapshots.end(),
                                          [&](double t) { return std::abs(t - s.time) <= 1e-12; });
            if (!snap) continue;
            const std::string tag = "gamma_" + time_tag(s.time);
            auto csv = open_output(config.output, tag + ".csv");
            csv << "point,x,y,gamma,gamma_reference\n";
            for (Eigen::Index p = 0; p < np; ++p) {
                csv << p << ',' << num(report.point_xy(p, 0)) << ',' << num(report.point_xy(p, 1)) << ','
                    << num(s.gamma(p)) << ','
                    << num(ps.reference ? s.gamma_reference(p) : std::numeric_limits<double>::quiet_NaN()) << '\n';
            }
            auto vtk = open_output(config.output, tag + ".vtk");
            write_vtk(vtk, structure, s, ps.reference);
        }
        auto sum = open_output(config.output, "summary.txt");
        sum << "scenario: plate2d\n";
        sum << "elements: " << mesh.num_elements() << '\n';
        sum << "amplitude: " << num(report.amplitude) << '\n';
        sum << "qubits: " << config.solver.displacement.qubits << '\n';
        sum << "sampler: " << config.sampler.backend << '\n';
        sum << "seed: " << config.seed << '\n';
        for (std::size_t k = 0; k < report.steps.size(); ++k) {
            const auto& s = report.steps[k];
            sum << "step " << k + 1 << ": time=" << num(s.time) << " outer_iterations=" << s.outer_iterations
                << " outer_error=" << num(s.outer_error) << " force=" << num(s.force)
                << " force_reference=" << num(s.force_reference) << '\n';
        }
    }
    return report;
}

// ---------------------------------------------------------------------------

namespace {

std::string position(const std::string& text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

std::size_t index_of(const nlohmann::json& v, const std::string& what) {
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(what + " must be a non-negative integer");
    return static_cast<std::size_t>(v.get<long long>());
}

}  // namespace

QuboProblem parse_qubo(const std::string& text, const QuboProblem& defaults) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::string msg = e.what();
        const auto colon = msg.find("syntax error");
        if (colon != std::string::npos) msg = msg.substr(colon);
        throw ConfigError(position(text, e.byte) + ": " + msg);
    }
    QuboProblem p;
    p.num_reads = defaults.num_reads;
    p.annealing_time_us = defaults.annealing_time_us;
    p.seed = defaults.seed;
    const nlohmann::json* entries = nullptr;
    bool sized = false;
    if (doc.is_array()) {
        entries = &doc;
    } else if (doc.is_object()) {
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            const auto& k = it.key();
            if (k != "n" && k != "entries" && k != "num_reads" && k != "annealing_time_us" && k != "seed" && k != "id") {
                throw ConfigError("unknown field '" + k + "'");
            }
        }
        if (!doc.contains("entries")) throw ConfigError("missing field 'entries'");
        entries = &doc["entries"];
        if (doc.contains("n")) {
            p.size = index_of(doc["n"], "'n'");
            sized = true;
        }
        if (doc.contains("num_reads")) {
            const auto& r = doc["num_reads"];
            if (!r.is_number_integer() || r.get<long long>() < 1) throw ConfigError("'num_reads' must be a positive integer");
            p.num_reads = static_cast<int>(r.get<long long>());
        }
        if (doc.contains("annealing_time_us")) {
            const auto& a = doc["annealing_time_us"];
            if (!a.is_number() || !(a.get<double>() > 0.0)) throw ConfigError("'annealing_time_us' must be positive");
            p.annealing_time_us = a.get<double>();
        }
        if (doc.contains("seed")) {
            const auto& s = doc["seed"];
            if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
                throw ConfigError("'seed' must be a non-negative integer");
            }
            p.seed = s.get<std::uint64_t>();
        }
    } else {
        throw ConfigError("QUBO file must hold an object or an array of entries");
    }
    if (!entries->is_array()) throw ConfigError("'entries' must be an array");
    std::size_t max_index = 0;
    bool any = false;
    for (std::size_t k = 0; k < entries->size(); ++k) {
        const auto& e = (*entries)[k];
        const std::string where = "entry " + std::to_string(k);
        if (!e.is_array() || e.size() != 3) throw ConfigError(where + " must be [i, j, value]");
        const std::size_t i = index_of(e[0], where + " row");
        const std::size_t j = index_of(e[1], where + " column");
        if (!e[2].is_number()) throw ConfigError(where + " value must be a number");
        if (i > j) throw ConfigError(where + " is below the diagonal (need i <= j)");
        if (sized && j >= p.size) throw ConfigError(where + " index out of range for n = " + std::to_string(p.size));
        p.entries.push_back({i, j, e[2].get<double>()});
        max_index = std::max(max_index, j);
        any = true;
    }
    if (!sized) p.size = any ? max_index + 1 : 0;
    if (p.size == 0) throw ConfigError("QUBO has no variables");
    try {
        p.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return p;
}

QuboProblem read_qubo_file(const std::string& path, const QuboProblem& defaults) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open QUBO file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_qubo(ss.str(), defaults);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

Sample run_qubo_file(const RunConfig& config, std::ostream& out) {
    QuboProblem defaults;
    defaults.num_reads = config.sampler.num_reads;
    defaults.annealing_time_us = config.sampler.annealing_time_us;
    defaults.seed = config.seed;
    const QuboProblem p = read_qubo_file(config.qubo_path, defaults);
    auto sampler = create_sampler(config.sampler.backend, config.sampler);
    const SampleSet set = sampler->sample(p);
    const Sample best = set.best();
    for (std::size_t k = 0; k < best.bits.size(); ++k) out << static_cast<int>(best.bits[k]) << ' ';
    out << num(best.energy) << '\n';
    return best;
}

}  // namespace qafem
