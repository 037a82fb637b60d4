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

#include <chrono>
#include <random>

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include "qafem/errors.hpp"
#include "qafem/sampler.hpp"

using namespace qafem;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<std::string> loopback(std::vector<std::string> extra = {}) {
    std::vector<std::string> cmd{QAFEM_LOOPBACK};
    cmd.insert(cmd.end(), extra.begin(), extra.end());
    return cmd;
}

QuboProblem random_qubo(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    QuboProblem p;
    p.size = n;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) p.add(i, j, u(rng));
    }
    p.seed = n;
    return p;
}

}  // namespace

TEST_CASE("request encoding") {
    QuboProblem p;
    p.size = 2;
    p.add(0, 1, -2.5);
    p.add(1, 1, 0.1);
    p.num_reads = 7;
    p.seed = 3;
    const auto j = nlohmann::json::parse(BridgeSampler::encode_request(42, p));
    CHECK(j["id"] == 42);
    CHECK(j["n"] == 2);
    CHECK(j["num_reads"] == 7);
    CHECK(j["seed"] == 3);
    CHECK(j["entries"].size() == 2);
    CHECK(j["entries"][0][2].get<double>() == -2.5);
    CHECK(j["entries"][1][2].get<double>() == 0.1);
}

TEST_CASE("loopback bridge agrees with the exhaustive backend") {
    std::mt19937_64 rng(31);
    BridgeSampler bridge(loopback());
    ExhaustiveSampler local;
    for (int k = 0; k < 20; ++k) {
        const auto p = random_qubo(rng, 1 + static_cast<std::size_t>(k) % 12);
        const auto remote = bridge.sample(p).best();
        const auto exact = local.sample(p).best();
        CHECK(remote.bits == exact.bits);
        CHECK(remote.energy == exact.energy);
    }
}

TEST_CASE("responses are matched by id whatever their order") {
    std::mt19937_64 rng(32);
    QuboProblem whole;
    std::vector<QuboProblem> parts;
    for (std::size_t k = 0; k < 3; ++k) {
        auto part = random_qubo(rng, 4 + k);
        whole.blocks.push_back({whole.size, part.size, part.seed});
        for (const auto& e : part.entries) whole.add(e.i + whole.size, e.j + whole.size, e.value);
        whole.size += part.size;
    }
    BridgeSampler reversed(loopback({"--reverse", "3"}));
    ExhaustiveSampler local;
    CHECK(reversed.sample(whole).best().bits == local.sample(whole).best().bits);
}

TEST_CASE("malformed responses are reported with their payload") {
    std::mt19937_64 rng(33);
    const auto p = random_qubo(rng, 3);
    BridgeSampler garbage(loopback({"--garbage"}));
    try {
        garbage.sample(p);
        FAIL("expected a malformed-response error");
    } catch (const MalformedResponseError& e) {
        CHECK(e.payload() == "<<not json>>");
    }
    BridgeSampler wrong(loopback({"--bad-energy"}));
    CHECK_THROWS_AS(wrong.sample(p), MalformedResponseError);
}

TEST_CASE("remote errors, early exit and timeouts") {
    std::mt19937_64 rng(34);
    const auto p = random_qubo(rng, 3);
    BridgeSampler failing(loopback({"--error"}));
    CHECK_THROWS_AS(failing.sample(p), RemoteError);
    BridgeSampler quitting(loopback({"--exit"}));
    CHECK_THROWS_AS(quitting.sample(p), TransportError);
    BridgeSampler slow(loopback({"--sleep", "5"}), 0.3);
    const auto t0 = std::chrono::steady_clock::now();
    CHECK_THROWS_AS(slow.sample(p), TimeoutError);
    CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(4));
    BridgeSampler missing({"/nonexistent/sampler"});
    CHECK_THROWS_AS(missing.sample(p), TransportError);
}

TEST_CASE("the client recovers after a failed exchange") {
    std::mt19937_64 rng(35);
    const auto p = random_qubo(rng, 4);
    BridgeSampler bridge(loopback());
    CHECK(bridge.sample(p).best().bits == ExhaustiveSampler().sample(p).best().bits);
    QuboProblem empty;
    CHECK_THROWS_AS(bridge.sample(empty), ProtocolError);
    CHECK(bridge.sample(p).best().bits == ExhaustiveSampler().sample(p).best().bits);
}

TEST_CASE("bridge construction checks") {
    CHECK_THROWS_AS(BridgeSampler({}), InvalidArgumentError);
    CHECK_THROWS_AS(BridgeSampler({"x"}, 0.0), InvalidArgumentError);
}
