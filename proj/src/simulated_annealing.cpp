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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "qafem/sampler.hpp"

namespace qafem {

AnnealingSchedule annealing_schedule(const QuboProblem& problem) {
    const std::size_t n = problem.size;
    std::vector<double> span(n, 0.0);
    std::vector<double> smallest(n, std::numeric_limits<double>::infinity());
    double max_abs = 0.0;
    for (const auto& e : problem.entries) max_abs = std::max(max_abs, std::abs(e.value));
    for (const auto& e : problem.entries) {
        const double a = std::abs(e.value);
        if (a <= 1e-12 * max_abs) continue;
        span[e.i] += a;
        smallest[e.i] = std::min(smallest[e.i], a);
        if (e.j != e.i) {
            span[e.j] += a;
            smallest[e.j] = std::min(smallest[e.j], a);
        }
    }
    AnnealingSchedule s;
    s.sweeps = std::max(64, static_cast<int>(std::ceil(4.0 * problem.annealing_time_us)));
    if (max_abs == 0.0) {
        s.hot = 1.0;
        s.cold = 1.0;
        return s;
    }
    const double widest = *std::max_element(span.begin(), span.end());
    const double finest = *std::min_element(smallest.begin(), smallest.end());
    // Uphill flips accepted with probability 1/2 at the start and 1/100 at the end.
    s.hot = widest / std::log(2.0);
    s.cold = finest / std::log(100.0);
    return s;
}

namespace {

struct Adjacency {
    std::vector<double> diag;
    std::vector<std::size_t> start;
    std::vector<std::size_t> index;
    std::vector<double> weight;
};

Adjacency build_adjacency(const QuboProblem& problem) {
    const std::size_t n = problem.size;
    Adjacency adj;
    adj.diag.assign(n, 0.0);
    std::vector<std::map<std::size_t, double>> rows(n);
    for (const auto& e : problem.entries) {
        if (e.i == e.j) {
            adj.diag[e.i] += e.value;
        } else {
            rows[e.i][e.j] += e.value;
            rows[e.j][e.i] += e.value;
        }
    }
    adj.start.assign(n + 1, 0);
    for (std::size_t k = 0; k < n; ++k) {
        for (const auto& [j, v] : rows[k]) {
            adj.index.push_back(j);
            adj.weight.push_back(v);
        }
        adj.start[k + 1] = adj.index.size();
    }
    return adj;
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

SampleSet SimulatedAnnealingSampler::sample_block(const QuboProblem& problem) {
    const std::size_t n = problem.size;
    const Adjacency adj = build_adjacency(problem);
    const AnnealingSchedule sched = annealing_schedule(problem);

    std::vector<double> betas(static_cast<std::size_t>(sched.sweeps));
    for (int s = 0; s < sched.sweeps; ++s) {
        const double frac = sched.sweeps == 1 ? 1.0 : static_cast<double>(s) / (sched.sweeps - 1);
        betas[static_cast<std::size_t>(s)] = 1.0 / (sched.hot * std::pow(sched.cold / sched.hot, frac));
    }

    std::vector<Sample> samples;
    samples.reserve(static_cast<std::size_t>(problem.num_reads));
    Bits bits(n);
    std::vector<double> field(n);

    auto flip = [&](std::size_t k) {
        const double sign = bits[k] ? -1.0 : 1.0;
        bits[k] ^= 1;
        for (std::size_t p = adj.start[k]; p < adj.start[k + 1]; ++p) field[adj.index[p]] += sign * adj.weight[p];
    };

    for (int r = 0; r < problem.num_reads; ++r) {
        std::mt19937_64 rng(mix_seed(problem.seed ^ static_cast<std::uint64_t>(r)));
        for (std::size_t k = 0; k < n; ++k) bits[k] = static_cast<std::uint8_t>(rng() >> 63);
        for (std::size_t k = 0; k < n; ++k) {
            double f = adj.diag[k];
            for (std::size_t p = adj.start[k]; p < adj.start[k + 1]; ++p) {
                if (bits[adj.index[p]]) f += adj.weight[p];
            }
            field[k] = f;
        }
        for (const double beta : betas) {
            for (std::size_t k = 0; k < n; ++k) {
                const double delta = bits[k] ? -field[k] : field[k];
                if (delta <= 0.0 || uniform01(rng) < std::exp(-beta * delta)) flip(k);
            }
        }
        for (int pass = 0, improved = 1; improved && pass < 1000; ++pass) {
            improved = 0;
            for (std::size_t k = 0; k < n; ++k) {
                const double delta = bits[k] ? -field[k] : field[k];
                if (delta < 0.0) {
                    flip(k);
                    improved = 1;
                }
            }
        }
        samples.push_back({bits, problem.energy(bits)});
    }
    return SampleSet(std::move(samples));
}

}  // namespace qafem
