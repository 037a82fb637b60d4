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

#include <random>

#include <Eigen/SparseCholesky>
#include <catch_amalgamated.hpp>

#include "qafem/config.hpp"
#include "qafem/double_minimization.hpp"
#include "qafem/oracle.hpp"
#include "test_support.hpp"

using namespace qafem;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Structure bar(std::size_t n) { return Structure(build_line_mesh(1.0, n), bar_material(), {{"fixed", 0, 0.0}}); }

Eigen::VectorXd body_force(const Structure& s, double b0) {
    Loads loads;
    loads.body_force = Eigen::Vector2d(b0, 0.0);
    return s.external_force(loads);
}

}  // namespace

TEST_CASE("internal objective splits the potential by point") {
    std::mt19937_64 rng(71);
    for (int which = 0; which < 2; ++which) {
        const Structure s = which == 0 ? bar(5)
                                       : Structure(build_grid_mesh(1.0, 0.5, 2, 1), plate_material(),
                                                   {{"left", 0, 0.0}, {"corner", 1, 0.0}, {"right", 0, 0.01}});
        const auto st = test::random_structure_state(rng, s, 2e-3);
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(st.f_ext.size());
        InternalObjective obj(s, st.displacement, st.history);
        const auto blocks = obj.blocks();
        REQUIRE(blocks.size() == s.num_points());
        const auto model = s.quadratic_model_Q(st.displacement, st.q, st.history, zero);
        double total = 0.0;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const Eigen::VectorXd v = st.q.segment(static_cast<Eigen::Index>(blocks[b].offset),
                                                   static_cast<Eigen::Index>(blocks[b].size));
            total += obj.block_value(b, v);
            const auto local = obj.block_model(b, v);
            const Eigen::VectorXd g = model.form.gradient.segment(static_cast<Eigen::Index>(blocks[b].offset),
                                                                  static_cast<Eigen::Index>(blocks[b].size));
            CHECK((local.gradient - g).norm() <= 1e-12 * std::max(1.0, g.norm()));
        }
        CHECK_THAT(total, WithinRel(s.assemble_phi(st.displacement, st.q, st.history, zero), 1e-12));
    }
}

TEST_CASE("refreshing admissible normals leaves the potential unchanged") {
    std::mt19937_64 rng(72);
    const Structure s = bar(4);
    auto st = test::random_structure_state(rng, s, 2e-3);
    const Eigen::VectorXd unit = default_alpha(1);
    for (std::size_t p = 0; p < s.num_points(); p += 2) {
        st.q(static_cast<Eigen::Index>(s.dofs().q_index(p, 0))) = 0.0;
        st.q.segment(static_cast<Eigen::Index>(s.dofs().q_index(p, 1)), unit.size()) = unit;
    }
    const double before = s.assemble_phi(st.displacement, st.q, st.history, st.f_ext);
    Eigen::VectorXd q = st.q;
    refresh_normals(s, st.displacement, st.history, DoubleMinConfig{}, q);
    CHECK_THAT(s.assemble_phi(st.displacement, q, st.history, st.f_ext), WithinRel(before, 1e-12));
    for (std::size_t p = 1; p < s.num_points(); p += 2) {
        CHECK(s.point_unknowns(q, p).alpha == s.point_unknowns(st.q, p).alpha);
    }
}

TEST_CASE("an elastic step converges in one outer iteration") {
    const Structure s = bar(4);
    const Eigen::VectorXd f = body_force(s, 100.0);
    ExhaustiveSampler exact;
    const auto r = double_minimize(s, f, s.initial_history(), DoubleMinConfig{}, exact, exact, 5);
    CHECK(r.outer_iterations == 1);
    CHECK(r.outer_error == 0.0);
    CHECK(r.internal.size() == static_cast<Eigen::Index>(s.dofs().num_q()));
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(s.stiffness());
    const Eigen::VectorXd u = solver.solve(s.dofs().restrict(f));
    CHECK((s.dofs().restrict(r.displacement) - u).norm() <= 1e-6 * u.norm());
    for (const auto& pt : r.history.points) CHECK(pt.gamma == 0.0);
    CHECK(r.trace.back().phase == "outer");
}

TEST_CASE("a plastic bar step matches the Newton reference") {
    const std::size_t n = 4;
    const Structure s = bar(n);
    const Eigen::VectorXd f = body_force(s, 400.0);
    DoubleMinConfig cfg;
    cfg.tolerance = 1e-9;
    ExhaustiveSampler exact;
    const auto r = double_minimize(s, f, s.initial_history(), cfg, exact, exact, 9);
    CHECK(r.outer_error <= 1e-9);
    CHECK(r.outer_iterations > 1);

    LoadStep step;
    step.time = 1.0;
    step.dirichlet = {{"fixed", 0, 0.0}};
    step.loads.body_force = Eigen::Vector2d(400.0, 0.0);
    const auto ref = newton_fem_reference(s.mesh(), s.material(), {step});
    CHECK((r.displacement - ref[0].displacement).norm() <= 1e-4 * ref[0].displacement.norm());
    for (std::size_t p = 0; p < s.num_points(); ++p) {
        CHECK_THAT(r.history.points[p].gamma, WithinAbs(ref[0].gamma(static_cast<Eigen::Index>(p)), 1e-3 * ref[0].gamma.maxCoeff()));
    }
    for (const auto& pt : r.history.points) CHECK(pt.gamma >= 0.0);
}

TEST_CASE("double minimisation is deterministic for a seed") {
    const Structure s = bar(3);
    const Eigen::VectorXd f = body_force(s, 300.0);
    SimulatedAnnealingSampler sa;
    ExhaustiveSampler exact;
    DoubleMinConfig cfg;
    cfg.displacement.num_reads = 10;
    const auto a = double_minimize(s, f, s.initial_history(), cfg, sa, exact, 3);
    const auto b = double_minimize(s, f, s.initial_history(), cfg, sa, exact, 3);
    CHECK(a.displacement == b.displacement);
    CHECK(a.internal == b.internal);
    CHECK(a.trace.size() == b.trace.size());
}

TEST_CASE("non-convergence carries the trace") {
    const Structure s = bar(3);
    const Eigen::VectorXd f = body_force(s, 400.0);
    DoubleMinConfig cfg;
    cfg.max_outer = 1;
    ExhaustiveSampler exact;
    try {
        double_minimize(s, f, s.initial_history(), cfg, exact, exact, 1);
        FAIL("expected non-convergence");
    } catch (const NonConvergenceError& e) {
        CHECK(!e.trace().empty());
        CHECK(e.trace().back().phase == "outer");
        CHECK(e.trace().back().relative_error > cfg.tolerance);
    }
    cfg.max_outer = 0;
    CHECK_THROWS_AS(double_minimize(s, f, s.initial_history(), cfg, exact, exact, 1), ConfigError);
}

TEST_CASE("internal bounds keep the multiplier non-negative") {
    const Structure s = bar(2);
    DoubleMinConfig cfg;
    Eigen::VectorXd lo, hi, eps;
    internal_bounds(s, cfg, lo, hi, eps);
    REQUIRE(lo.size() == static_cast<Eigen::Index>(s.dofs().num_q()));
    for (std::size_t p = 0; p < s.num_points(); ++p) {
        const auto i = static_cast<Eigen::Index>(s.dofs().q_index(p, 0));
        CHECK(lo(i) == 0.0);
        CHECK(eps(i) > 0.0);
        for (std::size_t k = 1; k < s.dofs().q_stride(); ++k) {
            const auto j = static_cast<Eigen::Index>(s.dofs().q_index(p, k));
            CHECK(lo(j) == -cfg.alpha_bound);
            CHECK(hi(j) == cfg.alpha_bound);
        }
    }
}
