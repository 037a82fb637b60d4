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

#include <bit>
#include <cmath>

#include "qafem/errors.hpp"
#include "qafem/sampler.hpp"

namespace qafem {

ExhaustiveSampler::ExhaustiveSampler(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ > 40) throw InvalidArgumentError("exhaustive capacity above 40 variables is not supported");
}

SampleSet ExhaustiveSampler::sample_block(const QuboProblem& problem) {
    const std::size_t n = problem.size;
    if (n > capacity_) {
        throw CapacityError("exhaustive sampler capacity is " + std::to_string(capacity_) + " variables, problem has " +
                            std::to_string(n));
    }
    std::vector<double> diag(n, 0.0);
    std::vector<double> w(n * n, 0.0);
    double scale = 0.0;
    for (const auto& e : problem.entries) {
        scale += std::abs(e.value);
        if (e.i == e.j) {
            diag[e.i] += e.value;
        } else {
            w[e.i * n + e.j] += e.value;
            w[e.j * n + e.i] += e.value;
        }
    }
    const double tol = 1e-9 * scale;

    Bits bits(n, 0);
    std::vector<double> field = diag;
    double running = 0.0;
    Bits best = bits;
    double best_exact = 0.0;
    double threshold = tol;

    const std::uint64_t count = n == 0 ? 1 : (std::uint64_t{1} << n);
    for (std::uint64_t step = 1; step < count; ++step) {
        const auto k = static_cast<std::size_t>(std::countr_zero(step));
        const bool on = bits[k] == 0;
        running += on ? field[k] : -field[k];
        bits[k] = on ? 1 : 0;
        const double* wk = &w[k * n];
        if (on) {
            for (std::size_t j = 0; j < n; ++j) field[j] += wk[j];
        } else {
            for (std::size_t j = 0; j < n; ++j) field[j] -= wk[j];
        }
        if (running <= threshold) {
            const double exact = problem.energy(bits);
            if (better_sample(exact, bits, best_exact, best)) {
                best = bits;
                best_exact = exact;
            }
            threshold = std::min(threshold, running + tol);
        }
    }
    return SampleSet({Sample{std::move(best), best_exact}});
}

}  // namespace qafem
