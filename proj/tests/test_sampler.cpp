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

#include "qafem/errors.hpp"
#include "qafem/sampler.hpp"

using namespace qafem;
using Catch::Matchers::WithinAbs;

namespace {

QuboProblem random_qubo(std::mt19937_64& rng, std::size_t n, double density = 1.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> keep(0.0, 1.0);
    QuboProblem p;
    p.size = n;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            if (i == j || keep(rng) < density) p.add(i, j, u(rng));
        }
    }
    return p;
}

std::pair<double, Bits> brute_force(const QuboProblem& p) {
    double best = std::numeric_limits<double>::infinity();
    Bits arg;
    for (std::uint64_t m = 0; m < (1ull << p.size); ++m) {
        Bits b(p.size);
        for (std::size_t k = 0; k < p.size; ++k) b[k] = static_cast<std::uint8_t>((m >> k) & 1u);
        const double e = p.energy(b);
        if (better_sample(e, b, best, arg)) {
            best = e;
            arg = b;
        }
    }
    return {best, arg};
}

}  // namespace

TEST_CASE("QUBO validation") {
    QuboProblem p;
    p.size = 2;
    p.entries.push_back({1, 0, 1.0});
    CHECK_THROWS_AS(p.validate(), ContractError);
    p.entries = {{0, 2, 1.0}};
    CHECK_THROWS_AS(p.validate(), ContractError);
    p.entries = {{0, 1, std::nan("")}};
    CHECK_THROWS_AS(p.validate(), NumericError);
    p.entries = {{0, 1, 1.0}};
    p.num_reads = 0;
    CHECK_THROWS_AS(p.validate(), ContractError);
    p.num_reads = 1;
    p.blocks = {{0, 1, 0}};
    CHECK_THROWS_AS(p.validate(), ContractError);
}

TEST_CASE("repeated entries are summed and add() orders indices") {
    QuboProblem p;
    p.size = 2;
    p.add(1, 0, 2.0);
    p.add(0, 1, -0.5);
    p.add(1, 1, 1.0);
    CHECK(p.entries[0].i == 0);
    CHECK(p.energy(Bits{1, 1}) == 2.5);
    CHECK(p.energy(Bits{0, 1}) == 1.0);
    CHECK_THROWS_AS(p.energy(Bits{1}), ContractError);
}

TEST_CASE("best sample prefers lower energy, then the smaller bit-vector") {
    const SampleSet s({{{1, 0}, -1.0}, {{0, 1}, -1.0}, {{1, 1}, 0.0}});
    CHECK(s.best().bits == Bits{0, 1});
    CHECK_THROWS_AS(SampleSet().best(), ContractError);
}

TEST_CASE("seed derivation is deterministic and spreads nearby inputs") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(derive_seed(1, 2) != derive_seed(2, 2));
    CHECK(mix_seed(0) != mix_seed(1));
}

TEST_CASE("exhaustive sampler finds the enumerated optimum") {
    std::mt19937_64 rng(21);
    ExhaustiveSampler s;
    for (std::size_t n = 1; n <= 10; ++n) {
        const auto p = random_qubo(rng, n, 0.6);
        const auto [e, b] = brute_force(p);
        const auto set = s.sample(p);
        REQUIRE(set.size() == 1);
        CHECK(set.best().bits == b);
        CHECK_THAT(set.best().energy, WithinAbs(e, 1e-12));
    }
}

TEST_CASE("exhaustive sampler refuses problems above its capacity") {
    ExhaustiveSampler s(4);
    QuboProblem p;
    p.size = 5;
    CHECK_THROWS_AS(s.sample(p), CapacityError);
    CHECK_THROWS_AS(ExhaustiveSampler(41), InvalidArgumentError);
}

TEST_CASE("block-diagonal problems equal their blocks solved one by one") {
    std::mt19937_64 rng(4);
    QuboProblem whole;
    std::vector<QuboProblem> parts;
    for (std::size_t k = 0; k < 4; ++k) {
        auto part = random_qubo(rng, 3 + k);
        part.seed = 100 + k;
        whole.blocks.push_back({whole.size, part.size, part.seed});
        for (const auto& e : part.entries) whole.add(e.i + whole.size, e.j + whole.size, e.value);
        whole.size += part.size;
        parts.push_back(part);
    }
    for (const std::string name : {"exhaustive", "sa"}) {
        auto s = make_sampler(name);
        const auto merged = s->sample(whole).best();
        Bits expected;
        for (const auto& p : parts) {
            const auto b = s->sample(p).best().bits;
            expected.insert(expected.end(), b.begin(), b.end());
        }
        CHECK(merged.bits == expected);
        CHECK_THAT(merged.energy, WithinAbs(whole.energy(expected), 1e-12));
    }
    whole.add(0, whole.size - 1, 1.0);
    CHECK_THROWS_AS(make_sampler("exhaustive")->sample(whole), ContractError);
}

TEST_CASE("simulated annealing is deterministic for a seed") {
    std::mt19937_64 rng(9);
    auto p = random_qubo(rng, 30, 0.3);
    p.seed = 77;
    p.num_reads = 10;
    SimulatedAnnealingSampler s;
    const auto a = s.sample(p);
    const auto b = s.sample(p);
    REQUIRE(a.size() == 10);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a.samples()[k].bits == b.samples()[k].bits);
    p.seed = 78;
    const auto c = s.sample(p);
    bool differs = false;
    for (std::size_t k = 0; k < a.size(); ++k) differs = differs || a.samples()[k].bits != c.samples()[k].bits;
    CHECK(differs);
}

TEST_CASE("simulated annealing samples are one-flip local minima") {
    std::mt19937_64 rng(10);
    auto p = random_qubo(rng, 16, 0.5);
    p.num_reads = 20;
    SimulatedAnnealingSampler s;
    const auto set = s.sample(p);
    for (const auto& smp : set.samples()) {
        CHECK_THAT(smp.energy, WithinAbs(p.energy(smp.bits), 1e-12));
        for (std::size_t k = 0; k < p.size; ++k) {
            Bits f = smp.bits;
            f[k] ^= 1;
            CHECK(p.energy(f) >= smp.energy - 1e-12);
        }
    }
}

TEST_CASE("annealing schedule runs from hot to cold") {
    std::mt19937_64 rng(12);
    auto p = random_qubo(rng, 8);
    const auto s = annealing_schedule(p);
    CHECK(s.hot > s.cold);
    CHECK(s.cold > 0.0);
    CHECK(s.sweeps >= 64);
    p.annealing_time_us = 100.0;
    CHECK(annealing_schedule(p).sweeps == 400);
}

TEST_CASE("annealing handles an all-zero problem") {
    QuboProblem p;
    p.size = 3;
    p.num_reads = 2;
    const auto set = SimulatedAnnealingSampler().sample(p);
    CHECK(set.best().energy == 0.0);
}

TEST_CASE("Ising transform preserves energies") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_qubo(rng, 6, 0.7);
        const auto ising = qubo_to_ising(p);
        const auto back = ising_to_qubo(ising);
        double sum_h = 0.0, sum_j = 0.0;
        for (double h : ising.h) sum_h += h;
        for (const auto& c : ising.couplings) sum_j += c.value;
        for (std::uint64_t m = 0; m < 64; ++m) {
            Bits b(6);
            std::vector<int> spins(6);
            for (std::size_t k = 0; k < 6; ++k) {
                b[k] = static_cast<std::uint8_t>((m >> k) & 1u);
                spins[k] = 2 * b[k] - 1;
            }
            CHECK_THAT(ising.energy(spins), WithinAbs(p.energy(b), 1e-12));
            CHECK_THAT(back.energy(b) + ising.offset - sum_h + sum_j, WithinAbs(p.energy(b), 1e-12));
        }
    }
}

TEST_CASE("unknown sampler names") {
    CHECK_THROWS_AS(make_sampler("qpu"), ConfigError);
}
