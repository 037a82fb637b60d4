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

#include "qafem/mesh.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "qafem/errors.hpp"

namespace qafem {

std::string to_string(ElementKind kind) {
    switch (kind) {
        case ElementKind::line2:
            return "line2";
        case ElementKind::quad4:
            return "quad4";
    }
    return "unknown";
}

ElementKind element_kind_from_string(const std::string& name) {
    if (name == "line2") return ElementKind::line2;
    if (name == "quad4") return ElementKind::quad4;
    throw InvalidArgumentError("unknown element kind '" + name + "'");
}

std::size_t nodes_per_element(ElementKind kind) {
    return kind == ElementKind::line2 ? 2 : 4;
}

namespace {

int element_dimension(ElementKind kind) {
    return kind == ElementKind::line2 ? 1 : 2;
}

std::size_t faces_per_element(ElementKind kind) {
    return kind == ElementKind::line2 ? 2 : 4;
}

}  // namespace

Mesh::Mesh(int dimension, std::vector<std::array<double, 2>> coordinates, std::vector<Element> elements)
    : dimension_(dimension), coordinates_(std::move(coordinates)), elements_(std::move(elements)) {
    if (dimension_ != 1 && dimension_ != 2) {
        throw InvalidArgumentError("mesh dimension must be 1 or 2, got " + std::to_string(dimension_));
    }
    for (std::size_t e = 0; e < elements_.size(); ++e) {
        const auto& el = elements_[e];
        if (element_dimension(el.kind) != dimension_) {
            throw InvalidArgumentError("element " + std::to_string(e) + " of kind " + to_string(el.kind) +
                                       " does not match mesh dimension " + std::to_string(dimension_));
        }
        if (el.nodes.size() != nodes_per_element(el.kind)) {
            throw InvalidArgumentError("element " + std::to_string(e) + " has " + std::to_string(el.nodes.size()) +
                                       " nodes, expected " + std::to_string(nodes_per_element(el.kind)));
        }
        for (auto n : el.nodes) {
            if (n >= coordinates_.size()) {
                throw InvalidArgumentError("element " + std::to_string(e) + " references node " + std::to_string(n) +
                                           " but the mesh has " + std::to_string(coordinates_.size()) + " nodes");
            }
        }
    }
}

void Mesh::add_node_set(const std::string& name, std::vector<std::size_t> nodes) {
    for (auto n : nodes) {
        if (n >= num_nodes()) {
            throw InvalidArgumentError("node set '" + name + "' references missing node " + std::to_string(n));
        }
    }
    node_sets_[name] = std::move(nodes);
}

void Mesh::add_face_set(const std::string& name, std::vector<Face> faces) {
    for (const auto& f : faces) {
        if (f.element >= num_elements() || f.local >= faces_per_element(elements_[f.element].kind)) {
            throw InvalidArgumentError("face set '" + name + "' references missing face (" +
                                       std::to_string(f.element) + ", " + std::to_string(f.local) + ")");
        }
    }
    face_sets_[name] = std::move(faces);
}

const std::vector<std::size_t>& Mesh::node_set(const std::string& name) const {
    auto it = node_sets_.find(name);
    if (it == node_sets_.end()) throw ConfigError("unknown node set '" + name + "'");
    return it->second;
}

const std::vector<Face>& Mesh::face_set(const std::string& name) const {
    auto it = face_sets_.find(name);
    if (it == face_sets_.end()) throw ConfigError("unknown face set '" + name + "'");
    return it->second;
}

std::vector<std::size_t> Mesh::face_nodes(const Face& face) const {
    const auto& el = element(face.element);
    if (el.kind == ElementKind::line2) return {el.nodes.at(face.local)};
    return {el.nodes.at(face.local), el.nodes.at((face.local + 1) % 4)};
}

Mesh build_line_mesh(double length, std::size_t n_elements) {
    if (!(length > 0.0) || n_elements < 1) {
        throw InvalidArgumentError("build_line_mesh needs length > 0 and at least one element");
    }
    std::vector<std::array<double, 2>> coords(n_elements + 1);
    const double h = length / static_cast<double>(n_elements);
    for (std::size_t i = 0; i <= n_elements; ++i) coords[i] = {h * static_cast<double>(i), 0.0};
    coords.back()[0] = length;
    std::vector<Element> elements(n_elements);
    for (std::size_t e = 0; e < n_elements; ++e) elements[e] = {ElementKind::line2, {e, e + 1}};
    Mesh mesh(1, std::move(coords), std::move(elements));
    mesh.add_node_set("fixed", {0});
    mesh.add_node_set("free_end", {n_elements});
    mesh.add_face_set("free_end", {Face{n_elements - 1, 1}});
    return mesh;
}

Mesh build_grid_mesh(double lx, double ly, std::size_t nx, std::size_t ny) {
    if (!(lx > 0.0) || !(ly > 0.0) || nx < 1 || ny < 1) {
        throw InvalidArgumentError("build_grid_mesh needs positive extents and at least one cell per direction");
    }
    auto id = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };
    std::vector<std::array<double, 2>> coords((nx + 1) * (ny + 1));
    for (std::size_t j = 0; j <= ny; ++j) {
        for (std::size_t i = 0; i <= nx; ++i) {
            coords[id(i, j)] = {lx * static_cast<double>(i) / static_cast<double>(nx),
                                ly * static_cast<double>(j) / static_cast<double>(ny)};
        }
    }
    std::vector<Element> elements;
    elements.reserve(nx * ny);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            elements.push_back({ElementKind::quad4, {id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)}});
        }
    }
    Mesh mesh(2, std::move(coords), std::move(elements));

    std::vector<std::size_t> left, right, bottom, top;
    for (std::size_t j = 0; j <= ny; ++j) {
        left.push_back(id(0, j));
        right.push_back(id(nx, j));
    }
    for (std::size_t i = 0; i <= nx; ++i) {
        bottom.push_back(id(i, 0));
        top.push_back(id(i, ny));
    }
    std::vector<Face> left_f, right_f, bottom_f, top_f;
    for (std::size_t j = 0; j < ny; ++j) {
        left_f.push_back({j * nx, 3});
        right_f.push_back({j * nx + nx - 1, 1});
    }
    for (std::size_t i = 0; i < nx; ++i) {
        bottom_f.push_back({i, 0});
        top_f.push_back({(ny - 1) * nx + i, 2});
    }
    mesh.add_node_set("left", std::move(left));
    mesh.add_node_set("right", std::move(right));
    mesh.add_node_set("bottom", std::move(bottom));
    mesh.add_node_set("top", std::move(top));
    mesh.add_node_set("corner", {id(0, 0)});
    mesh.add_face_set("left", std::move(left_f));
    mesh.add_face_set("right", std::move(right_f));
    mesh.add_face_set("bottom", std::move(bottom_f));
    mesh.add_face_set("top", std::move(top_f));
    return mesh;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    throw InvalidArgumentError("mesh line " + std::to_string(line) + ": " + what);
}

struct LineReader {
    std::istream& in;
    std::size_t line = 0;

    // Next non-empty, non-comment line, tokenised.
    bool next(std::istringstream& tokens) {
        std::string text;
        while (std::getline(in, text)) {
            ++line;
            auto hash = text.find('#');
            if (hash != std::string::npos) text.erase(hash);
            if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
            tokens.clear();
            tokens.str(text);
            return true;
        }
        return false;
    }
};

}  // namespace

Mesh read_mesh(std::istream& in) {
    LineReader reader{in};
    std::istringstream tok;
    std::string key;

    auto expect = [&](const std::string& keyword) -> std::size_t {
        if (!reader.next(tok)) parse_fail(reader.line, "unexpected end of input, expected '" + keyword + "'");
        std::size_t value = 0;
        if (!(tok >> key) || key != keyword || !(tok >> value)) {
            parse_fail(reader.line, "expected '" + keyword + " <count>'");
        }
        return value;
    };

    int dim = static_cast<int>(expect("dimension"));
    std::size_t n_nodes = expect("nodes");
    std::vector<std::array<double, 2>> coords(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        if (!reader.next(tok)) parse_fail(reader.line, "missing node coordinates");
        coords[i] = {0.0, 0.0};
        for (int k = 0; k < dim; ++k) {
            if (!(tok >> coords[i][static_cast<std::size_t>(k)])) parse_fail(reader.line, "bad coordinate");
        }
    }
    std::size_t n_elements = expect("elements");
    std::vector<Element> elements(n_elements);
    for (std::size_t e = 0; e < n_elements; ++e) {
        if (!reader.next(tok)) parse_fail(reader.line, "missing element");
        std::string kind;
        tok >> kind;
        try {
            elements[e].kind = element_kind_from_string(kind);
        } catch (const InvalidArgumentError& err) {
            parse_fail(reader.line, err.what());
        }
        elements[e].nodes.resize(nodes_per_element(elements[e].kind));
        for (auto& n : elements[e].nodes) {
            if (!(tok >> n)) parse_fail(reader.line, "bad connectivity");
        }
    }
    Mesh mesh(dim, std::move(coords), std::move(elements));

    while (reader.next(tok)) {
        std::string name;
        std::size_t count = 0;
        if (!(tok >> key >> name >> count)) parse_fail(reader.line, "expected 'nodeset|faceset <name> <count>'");
        if (key == "nodeset") {
            std::vector<std::size_t> nodes;
            while (nodes.size() < count) {
                if (!reader.next(tok)) parse_fail(reader.line, "truncated node set");
                std::size_t n;
                while (nodes.size() < count && tok >> n) nodes.push_back(n);
            }
            mesh.add_node_set(name, std::move(nodes));
        } else if (key == "faceset") {
            std::vector<Face> faces(count);
            for (auto& f : faces) {
                if (!reader.next(tok) || !(tok >> f.element >> f.local)) parse_fail(reader.line, "bad face entry");
            }
            mesh.add_face_set(name, std::move(faces));
        } else {
            parse_fail(reader.line, "unknown section '" + key + "'");
        }
    }
    return mesh;
}

Mesh read_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgumentError("cannot open mesh file '" + path + "'");
    return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
    out << std::setprecision(17);
    out << "dimension " << mesh.dimension() << "\n";
    out << "nodes " << mesh.num_nodes() << "\n";
    for (const auto& c : mesh.coordinates()) {
        out << c[0];
        if (mesh.dimension() == 2) out << ' ' << c[1];
        out << "\n";
    }
    out << "elements " << mesh.num_elements() << "\n";
    for (const auto& el : mesh.elements()) {
        out << to_string(el.kind);
        for (auto n : el.nodes) out << ' ' << n;
        out << "\n";
    }
    for (const auto& [name, nodes] : mesh.node_sets()) {
        out << "nodeset " << name << ' ' << nodes.size() << "\n";
        for (std::size_t i = 0; i < nodes.size(); ++i) out << nodes[i] << (i + 1 == nodes.size() ? "\n" : " ");
    }
    for (const auto& [name, faces] : mesh.face_sets()) {
        out << "faceset " << name << ' ' << faces.size() << "\n";
        for (const auto& f : faces) out << f.element << ' ' << f.local << "\n";
    }
}

// ---------------------------------------------------------------------------
// Interpolation

std::vector<QuadraturePoint> reference_rule(ElementKind kind) {
    if (kind == ElementKind::line2) return {QuadraturePoint{{0.0, 0.0}, 2.0}};
    const double g = 1.0 / std::sqrt(3.0);
    return {QuadraturePoint{{-g, -g}, 1.0}, QuadraturePoint{{g, -g}, 1.0}, QuadraturePoint{{g, g}, 1.0},
            QuadraturePoint{{-g, g}, 1.0}};
}

Eigen::VectorXd shape_values(ElementKind kind, const std::array<double, 2>& xi) {
    if (kind == ElementKind::line2) {
        Eigen::VectorXd n(2);
        n << 0.5 * (1.0 - xi[0]), 0.5 * (1.0 + xi[0]);
        return n;
    }
    const double s = xi[0], t = xi[1];
    Eigen::VectorXd n(4);
    n << 0.25 * (1 - s) * (1 - t), 0.25 * (1 + s) * (1 - t), 0.25 * (1 + s) * (1 + t), 0.25 * (1 - s) * (1 + t);
    return n;
}

Eigen::MatrixXd shape_derivatives(ElementKind kind, const std::array<double, 2>& xi, int dimension) {
    if (kind == ElementKind::line2) {
        Eigen::MatrixXd d(dimension, 2);
        d.setZero();
        d(0, 0) = -0.5;
        d(0, 1) = 0.5;
        return d;
    }
    const double s = xi[0], t = xi[1];
    Eigen::MatrixXd d(2, 4);
    d << -0.25 * (1 - t), 0.25 * (1 - t), 0.25 * (1 + t), -0.25 * (1 + t),  //
        -0.25 * (1 - s), -0.25 * (1 + s), 0.25 * (1 + s), 0.25 * (1 - s);
    return d;
}

namespace {

struct Jacobian {
    Eigen::MatrixXd dN_dx;  // d x n_e physical gradients
    double det = 0.0;
    Eigen::Vector2d x = Eigen::Vector2d::Zero();
};

Jacobian jacobian(const Mesh& mesh, std::size_t e, const std::array<double, 2>& xi) {
    const auto& el = mesh.element(e);
    const int d = mesh.dimension();
    const std::size_t ne = el.nodes.size();
    Eigen::MatrixXd X(ne, d);
    for (std::size_t a = 0; a < ne; ++a) {
        for (int k = 0; k < d; ++k) X(static_cast<Eigen::Index>(a), k) = mesh.node(el.nodes[a])[static_cast<std::size_t>(k)];
    }
    Eigen::MatrixXd dN = shape_derivatives(el.kind, xi, d).topRows(d);
    Eigen::MatrixXd J = dN * X;  // J(r, k) = d x_k / d xi_r
    Jacobian out;
    out.det = J.determinant();
    if (!(out.det > 0.0)) throw MeshQualityError(e, "non-positive Jacobian determinant");
    out.dN_dx = J.inverse() * dN;
    Eigen::VectorXd N = shape_values(el.kind, xi);
    for (int k = 0; k < d; ++k) out.x(k) = N.dot(X.col(k));
    return out;
}

}  // namespace

QuadratureRule::QuadratureRule(const Mesh& mesh) {
    points_.resize(mesh.num_elements());
    offsets_.resize(mesh.num_elements());
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        offsets_[e] = total_;
        for (auto qp : reference_rule(mesh.element(e).kind)) {
            qp.weight *= jacobian(mesh, e, qp.xi).det;
            points_[e].push_back(qp);
        }
        total_ += points_[e].size();
    }
}

double QuadratureRule::element_measure(std::size_t element) const {
    double sum = 0.0;
    for (const auto& qp : points(element)) sum += qp.weight;
    return sum;
}

KinematicTables::KinematicTables(const Mesh& mesh, const QuadratureRule& rule) {
    if (rule.num_elements() != mesh.num_elements()) {
        throw ContractError("quadrature rule does not match the mesh");
    }
    const int d = mesh.dimension();
    tables_.resize(mesh.num_elements());
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto& el = mesh.element(e);
        const auto ne = static_cast<Eigen::Index>(el.nodes.size());
        for (const auto& qp : rule.points(e)) {
            Jacobian jac = jacobian(mesh, e, qp.xi);
            Eigen::VectorXd Nv = shape_values(el.kind, qp.xi);
            PointKinematics pk;
            pk.weight = qp.weight;
            pk.x = jac.x;
            pk.N = Eigen::MatrixXd::Zero(d, d * ne);
            pk.B = Eigen::MatrixXd::Zero(d * d, d * ne);
            for (Eigen::Index a = 0; a < ne; ++a) {
                for (int k = 0; k < d; ++k) {
                    const Eigen::Index col = a * d + k;
                    pk.N(k, col) = Nv(a);
                    for (int i = 0; i < d; ++i) {
                        for (int j = 0; j < d; ++j) {
                            double v = 0.0;
                            if (i == k) v += 0.5 * jac.dN_dx(j, a);
                            if (j == k) v += 0.5 * jac.dN_dx(i, a);
                            pk.B(i * d + j, col) = v;
                        }
                    }
                }
            }
            tables_[e].push_back(std::move(pk));
        }
    }
}

std::vector<std::size_t> element_dofs(const Mesh& mesh, std::size_t e) {
    const auto d = static_cast<std::size_t>(mesh.dimension());
    const auto& el = mesh.element(e);
    std::vector<std::size_t> dofs;
    dofs.reserve(el.nodes.size() * d);
    for (auto n : el.nodes) {
        for (std::size_t k = 0; k < d; ++k) dofs.push_back(n * d + k);
    }
    return dofs;
}

}  // namespace qafem
