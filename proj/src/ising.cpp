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

#include "qafem/errors.hpp"
#include "qafem/sampler.hpp"

namespace qafem {

double IsingProblem::energy(const std::vector<int>& spins) const {
    if (spins.size() != size) throw ContractError("spin vector length does not match the Ising size");
    double e = offset;
    for (std::size_t i = 0; i < size; ++i) e += h[i] * spins[i];
    for (const auto& c : couplings) e += c.value * spins[c.i] * spins[c.j];
    return e;
}

IsingProblem qubo_to_ising(const QuboProblem& problem) {
    problem.validate();
    IsingProblem out;
    out.size = problem.size;
    out.h.assign(problem.size, 0.0);
    for (const auto& e : problem.entries) {
        if (e.i == e.j) {
            out.h[e.i] += 0.5 * e.value;
            out.offset += 0.5 * e.value;
        } else {
            const double q = 0.25 * e.value;
            out.couplings.push_back({e.i, e.j, q});
            out.h[e.i] += q;
            out.h[e.j] += q;
            out.offset += q;
        }
    }
    return out;
}

QuboProblem ising_to_qubo(const IsingProblem& ising) {
    QuboProblem out;
    out.size = ising.size;
    std::vector<double> diag(ising.size, 0.0);
    for (std::size_t i = 0; i < ising.size; ++i) diag[i] += 2.0 * ising.h[i];
    for (const auto& c : ising.couplings) {
        if (c.i >= c.j || c.j >= ising.size) throw ContractError("Ising couplings must be strictly upper triangular");
        out.entries.push_back({c.i, c.j, 4.0 * c.value});
        diag[c.i] -= 2.0 * c.value;
        diag[c.j] -= 2.0 * c.value;
    }
    for (std::size_t i = 0; i < ising.size; ++i) {
        if (diag[i] != 0.0) out.entries.push_back({i, i, diag[i]});
    }
    return out;
}

}  // namespace qafem
