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

#include <sstream>

#include <catch_amalgamated.hpp>

#include "qafem/errors.hpp"
#include "qafem/mesh.hpp"

using namespace qafem;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("line mesh layout and sets") {
    const Mesh m = build_line_mesh(1.0, 4);
    CHECK(m.dimension() == 1);
    CHECK(m.num_nodes() == 5);
    CHECK(m.num_elements() == 4);
    CHECK_THAT(m.node(4)[0], WithinAbs(1.0, 1e-15));
    CHECK(m.node_set("fixed") == std::vector<std::size_t>{0});
    CHECK(m.node_set("free_end") == std::vector<std::size_t>{4});
    REQUIRE(m.face_set("free_end").size() == 1);
    CHECK(m.face_nodes(m.face_set("free_end").front()) == std::vector<std::size_t>{4});
}

TEST_CASE("grid mesh node sets") {
    const Mesh m = build_grid_mesh(1.0, 0.5, 8, 4);
    CHECK(m.num_nodes() == 45);
    CHECK(m.num_elements() == 32);
    CHECK(m.node_set("left").size() == 5);
    CHECK(m.node_set("right").size() == 5);
    CHECK(m.node_set("corner") == std::vector<std::size_t>{0});
    for (auto n : m.node_set("right")) CHECK_THAT(m.node(n)[0], WithinAbs(1.0, 1e-14));
    for (auto n : m.node_set("top")) CHECK_THAT(m.node(n)[1], WithinAbs(0.5, 1e-14));
}

TEST_CASE("quadrature weights sum to the domain measure") {
    const Mesh line = build_line_mesh(2.5, 7);
    const QuadratureRule lr(line);
    double sum = 0.0;
    for (std::size_t e = 0; e < lr.num_elements(); ++e) sum += lr.element_measure(e);
    CHECK_THAT(sum, WithinRel(2.5, 1e-14));
    CHECK(lr.num_points() == 7);

    const Mesh grid = build_grid_mesh(1.0, 0.5, 3, 2);
    const QuadratureRule gr(grid);
    sum = 0.0;
    for (std::size_t e = 0; e < gr.num_elements(); ++e) sum += gr.element_measure(e);
    CHECK_THAT(sum, WithinRel(0.5, 1e-14));
    CHECK(gr.num_points() == 24);
    CHECK(gr.global_index(2, 3) == 11);
}

TEST_CASE("shape functions form a partition of unity") {
    for (auto kind : {ElementKind::line2, ElementKind::quad4}) {
        for (const auto& xi : {std::array<double, 2>{0.1, -0.3}, std::array<double, 2>{-0.9, 0.7}}) {
            CHECK_THAT(shape_values(kind, xi).sum(), WithinAbs(1.0, 1e-15));
            const int d = kind == ElementKind::line2 ? 1 : 2;
            const Eigen::MatrixXd dn = shape_derivatives(kind, xi, d);
            for (int r = 0; r < d; ++r) CHECK_THAT(dn.row(r).sum(), WithinAbs(0.0, 1e-15));
        }
    }
}

TEST_CASE("B reproduces the strain of a linear field exactly") {
    const Mesh m = build_grid_mesh(1.0, 0.5, 3, 2);
    const QuadratureRule rule(m);
    const KinematicTables tables(m, rule);
    Eigen::Matrix2d grad;
    grad << 0.3, -0.1, 0.2, 0.05;
    for (std::size_t e = 0; e < m.num_elements(); ++e) {
        const auto dofs = element_dofs(m, e);
        Eigen::VectorXd ue(dofs.size());
        for (std::size_t a = 0; a < dofs.size(); ++a) {
            const auto& x = m.node(dofs[a] / 2);
            ue(static_cast<Eigen::Index>(a)) = grad.row(static_cast<Eigen::Index>(dofs[a] % 2)).dot(Eigen::Vector2d(x[0], x[1]));
        }
        for (std::size_t q = 0; q < tables.num_points(e); ++q) {
            const Eigen::VectorXd g = tables.at(e, q).B * ue;
            CHECK_THAT(g(0), WithinAbs(grad(0, 0), 1e-13));
            CHECK_THAT(g(1), WithinAbs(0.5 * (grad(0, 1) + grad(1, 0)), 1e-13));
            CHECK_THAT(g(2), WithinAbs(0.5 * (grad(0, 1) + grad(1, 0)), 1e-13));
            CHECK_THAT(g(3), WithinAbs(grad(1, 1), 1e-13));
        }
    }
}

TEST_CASE("mesh text format round trips") {
    const Mesh m = build_grid_mesh(2.0, 1.0, 2, 1);
    std::stringstream ss;
    write_mesh(ss, m);
    const Mesh r = read_mesh(ss);
    CHECK(r.num_nodes() == m.num_nodes());
    CHECK(r.num_elements() == m.num_elements());
    CHECK(r.node_sets() == m.node_sets());
    CHECK(r.face_set("right") == m.face_set("right"));
    for (std::size_t n = 0; n < m.num_nodes(); ++n) CHECK(r.node(n) == m.node(n));
}

TEST_CASE("mesh parser reports the offending line") {
    std::istringstream in("dimension 1\nnodes 2\n0\n1\nelements 1\nline2 0 7\n");
    CHECK_THROWS_AS(read_mesh(in), InvalidArgumentError);
    std::istringstream bad("dimension 1\nnodes 2\n0\nx\n");
    try {
        read_mesh(bad);
        FAIL("expected a parse error");
    } catch (const InvalidArgumentError& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
}

TEST_CASE("inverted elements are rejected") {
    Mesh m(2, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {Element{ElementKind::quad4, {0, 3, 2, 1}}});
    CHECK_THROWS_AS(KinematicTables(m, QuadratureRule(m)), MeshQualityError);
}

TEST_CASE("structural checks on construction") {
    CHECK_THROWS_AS(Mesh(3, {}, {}), InvalidArgumentError);
    CHECK_THROWS_AS(Mesh(1, {{0, 0}}, {Element{ElementKind::line2, {0, 1}}}), InvalidArgumentError);
    Mesh m = build_line_mesh(1.0, 2);
    CHECK_THROWS_AS(m.add_node_set("bad", {9}), InvalidArgumentError);
    CHECK_THROWS_AS(m.node_set("missing"), ConfigError);
}

TEST_CASE("shipped meshes load") {
    const std::string dir = std::string(QAFEM_DATA_DIR) + "/meshes/";
    const Mesh bar = read_mesh_file(dir + "bar_20.mesh");
    CHECK(bar.num_elements() == 20);
    const Mesh plate = read_mesh_file(dir + "plate_8x4.mesh");
    CHECK(plate.num_elements() == 32);
    CHECK(plate.has_node_set("corner"));
    const Mesh graded = read_mesh_file(dir + "bar_graded_20.mesh");
    REQUIRE(graded.num_elements() == 20);
    CHECK(graded.node(0)[0] == 0.0);
    CHECK_THAT(graded.node(1)[0], WithinAbs(0.002, 1e-15));
    CHECK(graded.node(20)[0] == 1.0);
    const QuadratureRule rule(graded);
    const KinematicTables tables(graded, rule);
    CHECK_THAT(tables.at(0, 0).x(0), WithinAbs(0.001, 1e-15));
    CHECK(graded.node_set("fixed") == std::vector<std::size_t>{0});
}
