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

#include "qafem/sampler.hpp"

#include <cmath>

#include "qafem/errors.hpp"

namespace qafem {

void QuboProblem::add(std::size_t i, std::size_t j, double value) {
    if (i > j) std::swap(i, j);
    entries.push_back({i, j, value});
}

void QuboProblem::validate() const {
    for (const auto& e : entries) {
        if (e.i > e.j) {
            throw ContractError("QUBO entry (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                                ") is below the diagonal");
        }
        if (e.j >= size) {
            throw ContractError("QUBO entry (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                                ") outside a problem of size " + std::to_string(size));
        }
        if (!std::isfinite(e.value)) throw NumericError("QUBO entry is not finite");
    }
    if (num_reads < 1) throw ContractError("num_reads must be at least 1");
    if (!(annealing_time_us > 0.0)) throw ContractError("annealing time must be positive");
    if (!blocks.empty()) {
        std::size_t next = 0;
        for (const auto& b : blocks) {
            if (b.offset != next || b.size == 0) throw ContractError("QUBO blocks must tile the problem in order");
            next += b.size;
        }
        if (next != size) throw ContractError("QUBO blocks do not cover the problem");
    }
}

double QuboProblem::energy(const Bits& bits) const {
    if (bits.size() != size) throw ContractError("bit-vector length does not match the QUBO size");
    double e = 0.0;
    for (const auto& q : entries) {
        if (bits[q.i] && bits[q.j]) e += q.value;
    }
    return e;
}

QuboProblem QuboProblem::block_problem(const QuboBlock& block) const {
    QuboProblem sub;
    sub.size = block.size;
    sub.num_reads = num_reads;
    sub.annealing_time_us = annealing_time_us;
    sub.seed = block.seed;
    return sub;
}

bool better_sample(double ea, const Bits& a, double eb, const Bits& b) {
    if (ea != eb) return ea < eb;
    return a < b;
}

SampleSet::SampleSet(std::vector<Sample> samples) : samples_(std::move(samples)) {
    for (std::size_t k = 1; k < samples_.size(); ++k) {
        if (better_sample(samples_[k].energy, samples_[k].bits, samples_[best_].energy, samples_[best_].bits)) {
            best_ = k;
        }
    }
}

const Sample& SampleSet::best() const {
    if (samples_.empty()) throw ContractError("empty sample set");
    return samples_[best_];
}

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(base ^ mix_seed(a)) ^ b);
}

SampleSet Sampler::sample(const QuboProblem& problem) {
    problem.validate();
    if (problem.blocks.empty()) return sample_block(problem);

    std::vector<QuboProblem> subs;
    subs.reserve(problem.blocks.size());
    std::vector<std::size_t> owner(problem.size);
    for (std::size_t k = 0; k < problem.blocks.size(); ++k) {
        const auto& b = problem.blocks[k];
        subs.push_back(problem.block_problem(b));
        for (std::size_t v = b.offset; v < b.offset + b.size; ++v) owner[v] = k;
    }
    for (const auto& e : problem.entries) {
        const std::size_t k = owner[e.i];
        if (owner[e.j] != k) throw ContractError("QUBO entry couples two blocks");
        const auto off = problem.blocks[k].offset;
        subs[k].entries.push_back({e.i - off, e.j - off, e.value});
    }
    auto results = sample_blocks(subs);
    Sample merged;
    merged.bits.reserve(problem.size);
    for (const auto& r : results) {
        const auto& best = r.best();
        merged.bits.insert(merged.bits.end(), best.bits.begin(), best.bits.end());
    }
    merged.energy = problem.energy(merged.bits);
    return SampleSet({std::move(merged)});
}

std::vector<SampleSet> Sampler::sample_blocks(const std::vector<QuboProblem>& problems) {
    std::vector<SampleSet> out;
    out.reserve(problems.size());
    for (const auto& p : problems) out.push_back(sample_block(p));
    return out;
}

std::unique_ptr<Sampler> make_sampler(const std::string& name, std::size_t exhaustive_capacity) {
    if (name == "exhaustive") return std::make_unique<ExhaustiveSampler>(exhaustive_capacity);
    if (name == "sa") return std::make_unique<SimulatedAnnealingSampler>();
    throw ConfigError("unknown sampler '" + name + "'");
}

}  // namespace qafem
