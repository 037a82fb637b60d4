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

#include "qafem/assembly.hpp"
#include "qafem/config.hpp"
#include "qafem/errors.hpp"
#include "test_support.hpp"

using namespace qafem;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Structure bar(std::size_t n = 10) {
    return Structure(build_line_mesh(1.0, n), bar_material(), {{"fixed", 0, 0.0}});
}

Structure plate(double u_right = 0.01) {
    return Structure(build_grid_mesh(1.0, 0.5, 4, 2), plate_material(),
                     {{"left", 0, 0.0}, {"corner", 1, 0.0}, {"right", 0, u_right}});
}

}  // namespace

TEST_CASE("dof map numbering") {
    const Structure s = plate(0.02);
    const auto& d = s.dofs();
    CHECK(d.num_full() == 30);
    CHECK(d.num_free() == 30 - 3 - 3 - 1);
    CHECK(d.constrained(0));
    CHECK(d.constrained(1));
    CHECK(!d.constrained(2));
    CHECK(d.q_stride() == 4);
    CHECK(d.num_q() == 32 * 4);
    const Eigen::VectorXd pres = s.prescribed();
    for (auto n : s.mesh().node_set("right")) CHECK(pres(static_cast<Eigen::Index>(2 * n)) == 0.02);
    const Eigen::VectorXd free = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(d.num_free()), 1.0, 2.0);
    const Eigen::VectorXd full = d.expand(free, pres);
    CHECK(d.restrict(full) == free);
    CHECK(full(0) == 0.0);
    CHECK_THROWS_AS(d.expand(free.head(3), pres), ContractError);
    CHECK_THROWS_AS(DofMap(s.mesh(), {{"left", 2, 0.0}}, 1), ConfigError);
}

TEST_CASE("stiffness is symmetric with rigid modes in its null space") {
    const Structure s = plate();
    const Eigen::MatrixXd K = Eigen::MatrixXd(s.full_stiffness());
    CHECK((K - K.transpose()).norm() <= 1e-12 * K.norm());
    Eigen::VectorXd tx = Eigen::VectorXd::Zero(K.rows()), ty = tx, rot = tx;
    for (std::size_t n = 0; n < s.mesh().num_nodes(); ++n) {
        const auto& x = s.mesh().node(n);
        const auto i = static_cast<Eigen::Index>(2 * n);
        tx(i) = 1.0;
        ty(i + 1) = 1.0;
        rot(i) = -x[1];
        rot(i + 1) = x[0];
    }
    for (const auto& mode : {tx, ty, rot}) CHECK((K * mode).norm() <= 1e-9 * K.norm());
    CHECK_NOTHROW(s.stiffness());
}

TEST_CASE("insufficient constraints are rank deficient") {
    const Structure s(build_grid_mesh(1.0, 1.0, 2, 2), plate_material(), {{"left", 0, 0.0}});
    CHECK_THROWS_AS(s.stiffness(), RankDeficiencyError);
}

TEST_CASE("elastic patch test reproduces a homogeneous strain") {
    const double u = 0.004;
    const Structure s = plate(u);
    const auto& d = s.dofs();
    const Eigen::VectorXd pres = s.prescribed();
    const History h = s.initial_history();
    const Eigen::VectorXd q = s.initial_internal(h);
    const Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.num_full()));
    const auto m = s.quadratic_model_U(pres, q, h, f);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(m.form.hessian);
    const Eigen::VectorXd full = d.expand(d.restrict(pres) + solver.solve(-m.form.gradient), pres);
    const auto& mat = s.material().elastic;
    const double lambda = mat.bulk - 2.0 * mat.shear / 3.0;
    const double eyy = -lambda / (lambda + 2.0 * mat.shear) * u;
    for (std::size_t p = 0; p < s.num_points(); ++p) {
        const Eigen::Matrix3d e = s.point_strain(p, full);
        CHECK_THAT(e(0, 0), WithinRel(u, 1e-10));
        CHECK_THAT(e(1, 1), WithinRel(eyy, 1e-10));
        CHECK_THAT(e(0, 1), WithinAbs(0.0, 1e-14));
    }
    const double sxx = (lambda + 2.0 * mat.shear) * u + lambda * eyy;
    CHECK_THAT(s.reaction(full, q, h, "right", 0), WithinRel(sxx * 0.5, 1e-10));
    CHECK_THAT(s.reaction(full, q, h, "left", 0), WithinRel(-sxx * 0.5, 1e-10));
}

TEST_CASE("external force of a body load integrates to its resultant") {
    const Structure s = bar(8);
    Loads loads;
    loads.body_force = Eigen::Vector2d(100.0, 0.0);
    CHECK_THAT(s.external_force(loads).sum(), WithinRel(100.0, 1e-14));
    const Structure p = plate();
    Loads t;
    t.tractions.push_back({"right", Eigen::Vector2d(10.0, -2.0)});
    const Eigen::VectorXd f = p.external_force(t);
    double fx = 0.0, fy = 0.0;
    for (Eigen::Index i = 0; i < f.size(); i += 2) {
        fx += f(i);
        fy += f(i + 1);
    }
    CHECK_THAT(fx, WithinRel(5.0, 1e-14));
    CHECK_THAT(fy, WithinRel(-1.0, 1e-14));
    t.tractions.front().face_set = "nowhere";
    CHECK_THROWS_AS(p.external_force(t), ConfigError);
}

TEST_CASE("displacement gradient matches finite differences of the potential") {
    std::mt19937_64 rng(51);
    for (int which = 0; which < 2; ++which) {
        const Structure s = which == 0 ? bar() : plate();
        const double scale = which == 0 ? 2e-3 : 5e-3;
        for (int trial = 0; trial < 5; ++trial) {
            const auto st = test::random_structure_state(rng, s, scale);
            const auto& d = s.dofs();
            const Eigen::VectorXd pres = st.displacement;
            const auto model = s.quadratic_model_U(st.displacement, st.q, st.history, st.f_ext);
            const Eigen::VectorXd fd = test::fd_gradient(
                [&](const Eigen::VectorXd& v) { return s.assemble_phi(d.expand(v, pres), st.q, st.history, st.f_ext); },
                d.restrict(st.displacement), 1e-2);
            CHECK((fd - model.form.gradient).norm() <= 1e-6 * model.form.gradient.norm());
            CHECK_THAT(model.value, WithinAbs(s.assemble_phi(st.displacement, st.q, st.history, st.f_ext), 0.0));
        }
    }
}

TEST_CASE("the displacement model is exact: the potential is quadratic in U") {
    std::mt19937_64 rng(52);
    const Structure s = plate();
    const auto st = test::random_structure_state(rng, s, 5e-3);
    const auto& d = s.dofs();
    const auto model = s.quadratic_model_U(st.displacement, st.q, st.history, st.f_ext);
    Eigen::VectorXd z(static_cast<Eigen::Index>(d.num_free()));
    std::uniform_real_distribution<double> u(-1e-3, 1e-3);
    for (auto& x : z) x = u(rng);
    const Eigen::VectorXd moved = d.expand(d.restrict(st.displacement) + z, st.displacement);
    CHECK_THAT(s.assemble_phi(moved, st.q, st.history, st.f_ext),
               WithinRel(model.value + model.form(z), 1e-10));
}

TEST_CASE("internal-variable gradient and Hessian match finite differences") {
    std::mt19937_64 rng(53);
    for (int which = 0; which < 2; ++which) {
        const Structure s = which == 0 ? bar(4) : plate();
        for (int trial = 0; trial < 3; ++trial) {
            const auto st = test::random_structure_state(rng, s, 2e-3);
            const auto model = s.quadratic_model_Q(st.displacement, st.q, st.history, st.f_ext);
            const Eigen::VectorXd fd = test::fd_gradient(
                [&](const Eigen::VectorXd& q) { return s.assemble_phi(st.displacement, q, st.history, st.f_ext); }, st.q,
                1e-4);
            CHECK((fd - model.form.gradient).norm() <= 1e-6 * model.form.gradient.norm());
            const Eigen::MatrixXd H = Eigen::MatrixXd(model.form.hessian);
            const auto stride = static_cast<Eigen::Index>(s.dofs().q_stride());
            for (Eigen::Index i = 0; i < H.rows(); ++i) {
                for (Eigen::Index j = 0; j < H.cols(); ++j) {
                    if (i / stride != j / stride) CHECK(H(i, j) == 0.0);
                }
            }
            for (Eigen::Index k = 0; k < std::min<Eigen::Index>(H.cols(), 8); ++k) {
                const Eigen::VectorXd col = test::fd_gradient(
                    [&](const Eigen::VectorXd& q) {
                        return s.quadratic_model_Q(st.displacement, q, st.history, st.f_ext).form.gradient(k);
                    },
                    st.q, 1e-7);
                CHECK((col - H.col(k)).norm() <= 1e-5 * std::max(1.0, H.col(k).norm()));
            }
        }
    }
}

TEST_CASE("internal force is the displacement gradient plus the external force") {
    std::mt19937_64 rng(54);
    const Structure s = plate();
    const auto st = test::random_structure_state(rng, s, 5e-3);
    const auto model = s.quadratic_model_U(st.displacement, st.q, st.history, st.f_ext);
    const Eigen::VectorXd fi = s.internal_force(st.displacement, st.q, st.history);
    CHECK((s.dofs().restrict(fi - st.f_ext) - model.form.gradient).norm() <= 1e-12 * fi.norm());
}

TEST_CASE("commit accumulates the point states") {
    std::mt19937_64 rng(55);
    const Structure s = bar(3);
    const auto st = test::random_structure_state(rng, s, 1e-3);
    const History next = s.commit(st.displacement, st.q, st.history);
    CHECK(next.displacement == st.displacement);
    for (std::size_t p = 0; p < s.num_points(); ++p) {
        const auto u = s.point_unknowns(st.q, p);
        CHECK_THAT(next.points[p].gamma, WithinAbs(st.history.points[p].gamma + u.dgamma, 1e-15));
        CHECK(next.points[p].strain == s.point_strain(p, st.displacement));
    }
    CHECK_THROWS_AS(s.assemble_phi(Eigen::VectorXd::Constant(st.displacement.size(), std::nan("")), st.q, st.history,
                                   st.f_ext),
                    NumericError);
}

TEST_CASE("initial internal variables take the last active normals") {
    const Structure s = bar(2);
    History h = s.initial_history();
    Eigen::VectorXd q = s.initial_internal(h);
    CHECK(s.point_unknowns(q, 0).alpha == default_alpha(1));
    h.points[1].alpha = Eigen::Vector2d(0.3, -0.4);
    q = s.initial_internal(h);
    CHECK(s.point_unknowns(q, 1).alpha == Eigen::Vector2d(0.3, -0.4));
    CHECK(s.point_unknowns(q, 1).dgamma == 0.0);
}
