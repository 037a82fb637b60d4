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

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qafem {

enum class ElementKind { line2, quad4 };

std::string to_string(ElementKind kind);
ElementKind element_kind_from_string(const std::string& name);
std::size_t nodes_per_element(ElementKind kind);

struct Element {
    ElementKind kind = ElementKind::line2;
    std::vector<std::size_t> nodes;
};

/// A face of an element, identified by its local face number. For line2 the
/// faces are the end points (0: first node, 1: second node); for quad4 the
/// edges are numbered counter-clockwise starting from the bottom edge.
struct Face {
    std::size_t element = 0;
    std::size_t local = 0;

    friend bool operator==(const Face&, const Face&) = default;
};

/// Small-strain finite element mesh in one or two dimensions. Coordinates are
/// in millimetres.
class Mesh {
 public:
    Mesh(int dimension, std::vector<std::array<double, 2>> coordinates, std::vector<Element> elements);

    int dimension() const noexcept { return dimension_; }
    std::size_t num_nodes() const noexcept { return coordinates_.size(); }
    std::size_t num_elements() const noexcept { return elements_.size(); }

    const std::array<double, 2>& node(std::size_t i) const { return coordinates_.at(i); }
    const std::vector<std::array<double, 2>>& coordinates() const noexcept { return coordinates_; }
    const Element& element(std::size_t e) const { return elements_.at(e); }
    const std::vector<Element>& elements() const noexcept { return elements_; }

    void add_node_set(const std::string& name, std::vector<std::size_t> nodes);
    void add_face_set(const std::string& name, std::vector<Face> faces);

    bool has_node_set(const std::string& name) const { return node_sets_.count(name) != 0; }
    bool has_face_set(const std::string& name) const { return face_sets_.count(name) != 0; }
    const std::vector<std::size_t>& node_set(const std::string& name) const;
    const std::vector<Face>& face_set(const std::string& name) const;
    const std::map<std::string, std::vector<std::size_t>>& node_sets() const noexcept { return node_sets_; }
    const std::map<std::string, std::vector<Face>>& face_sets() const noexcept { return face_sets_; }

    /// Node indices of a face, in element orientation.
    std::vector<std::size_t> face_nodes(const Face& face) const;

 private:
    int dimension_;
    std::vector<std::array<double, 2>> coordinates_;
    std::vector<Element> elements_;
    std::map<std::string, std::vector<std::size_t>> node_sets_;
    std::map<std::string, std::vector<Face>> face_sets_;
};

/// Uniform line2 mesh on [0, length]. Node set "fixed" holds node 0, node set
/// "free_end" the last node, face set "free_end" the end face at x = length.
Mesh build_line_mesh(double length, std::size_t n_elements);

/// Structured quad4 mesh on [0, lx] x [0, ly]. Node sets: "left", "right",
/// "bottom", "top", "corner" (bottom-left node). Face sets mirror the edges.
Mesh build_grid_mesh(double lx, double ly, std::size_t nx, std::size_t ny);

/// Text mesh format, see data/meshes/README.md.
Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const Mesh& mesh);

struct QuadraturePoint {
    std::array<double, 2> xi{};  // reference coordinates
    double weight = 0.0;         // includes the Jacobian determinant
};

/// Per-element quadrature: 1-point Gauss on line2, 2x2 Gauss on quad4.
class QuadratureRule {
 public:
    explicit QuadratureRule(const Mesh& mesh);

    const std::vector<QuadraturePoint>& points(std::size_t element) const { return points_.at(element); }
    std::size_t num_elements() const noexcept { return points_.size(); }
    std::size_t num_points() const noexcept { return total_; }
    /// Global index of point `eta` of element `e`; points are numbered element by element.
    std::size_t global_index(std::size_t e, std::size_t eta) const { return offsets_.at(e) + eta; }
    double element_measure(std::size_t element) const;

 private:
    std::vector<std::vector<QuadraturePoint>> points_;
    std::vector<std::size_t> offsets_;
    std::size_t total_ = 0;
};

/// Reference-element Gauss rule used by QuadratureRule (weights without the
/// Jacobian).
std::vector<QuadraturePoint> reference_rule(ElementKind kind);

/// Shape function values at reference coordinates.
Eigen::VectorXd shape_values(ElementKind kind, const std::array<double, 2>& xi);
/// Reference derivatives, one row per reference direction.
Eigen::MatrixXd shape_derivatives(ElementKind kind, const std::array<double, 2>& xi, int dimension);

struct PointKinematics {
    Eigen::MatrixXd N;  // d x (d * n_e)
    Eigen::MatrixXd B;  // d^2 x (d * n_e), rows follow the [i*d + j] flatten
    Eigen::Vector2d x = Eigen::Vector2d::Zero();  // physical location
    double weight = 0.0;
};

/// Shape-function and strain-displacement matrices at every quadrature point.
class KinematicTables {
 public:
    KinematicTables(const Mesh& mesh, const QuadratureRule& rule);

    const PointKinematics& at(std::size_t e, std::size_t eta) const { return tables_.at(e).at(eta); }
    std::size_t num_points(std::size_t e) const { return tables_.at(e).size(); }

 private:
    std::vector<std::vector<PointKinematics>> tables_;
};

/// Element-level dof indices into the full (node-major) displacement vector.
std::vector<std::size_t> element_dofs(const Mesh& mesh, std::size_t e);

}  // namespace qafem
