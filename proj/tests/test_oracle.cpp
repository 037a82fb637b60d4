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

#include <catch_amalgamated.hpp>

#include "qafem/config.hpp"
#include "qafem/errors.hpp"
#include "qafem/oracle.hpp"
#include "test_support.hpp"

using namespace qafem;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("closed-form bar: elastic limit and transition") {
    const Material m = bar_material();
    const BarSolution s(m, 100.0, 1.0);
    CHECK_THAT(s.elastic_limit(), WithinRel(122.5, 1e-12));
    CHECK(s.transition() == 0.0);
    const BarSolution p(m, 400.0, 1.0);
    CHECK_THAT(p.transition(), WithinRel(0.69375, 1e-12));
    CHECK(p.gamma(0.0) > 0.0);
    CHECK(p.gamma(0.7) == 0.0);
}

TEST_CASE("closed-form bar: fields are consistent") {
    const Material m = bar_material();
    const double c = m.elastic.bulk + 4.0 * m.elastic.shear / 3.0;
    for (double b0 : {100.0, 250.0, 400.0}) {
        const BarSolution s(m, b0, 1.0);
        CHECK(s.displacement(0.0) == 0.0);
        for (double x : {0.0, 0.1, 0.35, 0.6, 0.69, 0.7, 0.9, 1.0}) {
            CHECK_THAT(s.stress(x), WithinAbs(b0 * (1.0 - x), 1e-12));
            const double h = 1e-6;
            if (x > h && x < 1.0 - h && std::abs(x - s.transition()) > 1e-3) {
                CHECK_THAT((s.displacement(x + h) - s.displacement(x - h)) / (2.0 * h),
                           WithinRel(s.strain(x), 1e-6));
            }
            CHECK_THAT(c * s.strain(x) - 2.0 * m.elastic.shear * s.gamma(x), WithinAbs(s.stress(x), 1e-9 * b0));
        }
        if (s.transition() > 0.0) {
            const double xc = s.transition();
            CHECK_THAT(s.strain(xc - 1e-12), WithinRel(s.strain(xc + 1e-12), 1e-9));
            CHECK_THAT(s.gamma(xc - 1e-9), WithinAbs(0.0, 1e-9));
        }
    }
}

TEST_CASE("closed-form bar rejects unsupported input") {
    CHECK_THROWS_AS(BarSolution(plate_material(), 100.0, 1.0), UnsupportedLawError);
    CHECK_THROWS_AS(BarSolution(bar_material(), 0.0, 1.0), InvalidArgumentError);
    CHECK_THROWS_AS(BarSolution(bar_material(), 100.0, -1.0), InvalidArgumentError);
}

TEST_CASE("radial return satisfies the yield condition") {
    std::mt19937_64 rng(61);
    for (const Material& m : {bar_material(), plate_material()}) {
        for (int dim : {1, 2}) {
            for (int k = 0; k < 20; ++k) {
                const auto pt = test::random_point(rng, dim, m);
                const auto r = radial_return_point(pt.strain, pt.state, m);
                const double f_trial = r.trial_equivalent - m.hardening.yield_stress() - m.hardening.hardening(pt.state.gamma);
                if (f_trial <= 0.0) {
                    CHECK(r.dgamma == 0.0);
                    continue;
                }
                CHECK(r.dgamma > 0.0);
                const double flow = m.hardening.yield_stress() + m.hardening.hardening(pt.state.gamma + r.dgamma);
                CHECK_THAT(von_mises(r.stress), WithinRel(flow, 1e-9));
                CHECK_THAT(1.5 * (r.normal.array() * r.normal.array()).sum(), WithinRel(2.25, 1e-12));
                const double mean = r.stress.trace() / 3.0;
                CHECK_THAT(mean, WithinRel(m.elastic.bulk * pt.strain.trace(), 1e-9));
            }
        }
    }
}

TEST_CASE("radial return is elastic below yield") {
    const Material m = bar_material();
    Eigen::Matrix3d e = Eigen::Matrix3d::Zero();
    e(0, 0) = 1e-3;
    const auto r = radial_return_point(e, PointState{}, m);
    CHECK(r.dgamma == 0.0);
    const double c = m.elastic.bulk + 4.0 * m.elastic.shear / 3.0;
    CHECK_THAT(r.stress(0, 0), WithinRel(c * 1e-3, 1e-12));
}

TEST_CASE("Newton reference reproduces the closed-form bar") {
    const Material m = bar_material();
    const std::size_t n = 80;
    const Mesh mesh = build_line_mesh(1.0, n);
    for (double b0 : {100.0, 400.0}) {
        LoadStep step;
        step.time = 1.0;
        step.dirichlet = {{"fixed", 0, 0.0}};
        step.loads.body_force = Eigen::Vector2d(b0, 0.0);
        NewtonOptions opt;
        opt.reaction_set = "fixed";
        const auto out = newton_fem_reference(mesh, m, {step}, opt);
        REQUIRE(out.size() == 1);
        const BarSolution exact(m, b0, 1.0);
        double err = 0.0, norm = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            const double x = mesh.node(i)[0];
            err += std::pow(out[0].displacement(static_cast<Eigen::Index>(i)) - exact.displacement(x), 2);
            norm += std::pow(exact.displacement(x), 2);
        }
        CHECK(std::sqrt(err / norm) < 2e-3);
        CHECK_THAT(std::abs(out[0].reaction), WithinRel(b0 * (1.0 - 0.5 / static_cast<double>(n)), 1e-8));
        if (b0 < exact.elastic_limit()) {
            CHECK(std::sqrt(err / norm) < 1e-10);
            CHECK(out[0].gamma.maxCoeff() == 0.0);
        } else {
            CHECK(out[0].gamma.maxCoeff() > 0.0);
        }
    }
}

TEST_CASE("Newton reference checks its load path") {
    const Mesh mesh = build_line_mesh(1.0, 4);
    LoadStep a;
    a.time = 1.0;
    a.dirichlet = {{"fixed", 0, 0.0}};
    LoadStep b = a;
    CHECK_THROWS_AS(newton_fem_reference(mesh, bar_material(), {a, b}), ContractError);
    b.time = 2.0;
    b.dirichlet.clear();
    CHECK_THROWS_AS(newton_fem_reference(mesh, bar_material(), {a, b}), ContractError);
}
