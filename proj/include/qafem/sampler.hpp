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

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace qafem {

using Bits = std::vector<std::uint8_t>;

struct QuboEntry {
    std::size_t i = 0;
    std::size_t j = 0;
    double value = 0.0;
};

/// A diagonal block [offset, offset + size) solved independently with its own seed.
struct QuboBlock {
    std::size_t offset = 0;
    std::size_t size = 0;
    std::uint64_t seed = 0;
};

/// Minimise b^T A b over bit-vectors, A upper triangular and stored sparse.
/// Repeated (i, j) entries are summed.
struct QuboProblem {
    std::size_t size = 0;
    std::vector<QuboEntry> entries;
    int num_reads = 100;
    double annealing_time_us = 20.0;
    std::uint64_t seed = 0;
    /// Optional block-diagonal structure. When non-empty the blocks must tile
    /// [0, size) in order and no entry may couple two blocks.
    std::vector<QuboBlock> blocks;

    void add(std::size_t i, std::size_t j, double value);
    /// Throws ContractError on out-of-range or lower-triangular entries,
    /// NumericError on non-finite values.
    void validate() const;
    double energy(const Bits& bits) const;
    /// Entries of one block, reindexed from zero, with the request parameters
    /// copied and the block's seed.
    QuboProblem block_problem(const QuboBlock& block) const;
};

struct Sample {
    Bits bits;
    double energy = 0.0;
};

/// Samples in read order. best() is the lowest energy, ties broken by the
/// lexicographically smallest bit-vector.
class SampleSet {
 public:
    SampleSet() = default;
    explicit SampleSet(std::vector<Sample> samples);

    const std::vector<Sample>& samples() const noexcept { return samples_; }
    bool empty() const noexcept { return samples_.empty(); }
    std::size_t size() const noexcept { return samples_.size(); }
    const Sample& best() const;

 private:
    std::vector<Sample> samples_;
    std::size_t best_ = 0;
};

/// True when (ea, a) is preferred over (eb, b).
bool better_sample(double ea, const Bits& a, double eb, const Bits& b);

/// splitmix64 finaliser, used to derive per-read and per-block seeds.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

class Sampler {
 public:
    virtual ~Sampler() = default;

    /// Validates the problem and solves it. Problems carrying blocks are split,
    /// each block is solved on its own and the block-wise best samples are
    /// concatenated into a single-entry SampleSet.
    SampleSet sample(const QuboProblem& problem);

    virtual std::string name() const = 0;

 protected:
    virtual SampleSet sample_block(const QuboProblem& problem) = 0;
    /// Solve several independent problems; results in input order.
    virtual std::vector<SampleSet> sample_blocks(const std::vector<QuboProblem>& problems);
};

/// Full enumeration in Gray-code order. Returns the single global optimum.
class ExhaustiveSampler : public Sampler {
 public:
    explicit ExhaustiveSampler(std::size_t capacity = 24);

    std::string name() const override { return "exhaustive"; }
    std::size_t capacity() const noexcept { return capacity_; }

 protected:
    SampleSet sample_block(const QuboProblem& problem) override;

 private:
    std::size_t capacity_;
};

struct AnnealingSchedule {
    double hot = 0.0;
    double cold = 0.0;
    int sweeps = 0;
};

/// Schedule for a problem: temperatures from the per-variable flip energies,
/// geometric in between; sweeps from the annealing time.
AnnealingSchedule annealing_schedule(const QuboProblem& problem);

/// Single-flip Metropolis annealing, one independent chain per read, with a
/// greedy descent at the end of every chain.
class SimulatedAnnealingSampler : public Sampler {
 public:
    std::string name() const override { return "sa"; }

 protected:
    SampleSet sample_block(const QuboProblem& problem) override;
};

struct IsingProblem {
    std::size_t size = 0;
    std::vector<double> h;
    std::vector<QuboEntry> couplings;  // i < j
    double offset = 0.0;

    /// spins in {-1, +1}
    double energy(const std::vector<int>& spins) const;
};

/// Spin transform q = 2b - 1.
IsingProblem qubo_to_ising(const QuboProblem& problem);
/// Inverse transform. The constant offset - sum(h) + sum(J) is dropped.
QuboProblem ising_to_qubo(const IsingProblem& ising);

/// Client for an external sampler process speaking newline-delimited JSON on
/// its standard streams. The process is started on first use and kept alive.
class BridgeSampler : public Sampler {
 public:
    explicit BridgeSampler(std::vector<std::string> command, double timeout_seconds = 60.0);
    ~BridgeSampler() override;
    BridgeSampler(const BridgeSampler&) = delete;
    BridgeSampler& operator=(const BridgeSampler&) = delete;

    std::string name() const override { return "bridge"; }

    /// Serialised request line (without the trailing newline).
    static std::string encode_request(std::uint64_t id, const QuboProblem& problem);

 protected:
    SampleSet sample_block(const QuboProblem& problem) override;
    std::vector<SampleSet> sample_blocks(const std::vector<QuboProblem>& problems) override;

 private:
    void start();
    void stop() noexcept;
    /// Send the requests and collect one SampleSet per problem, matching
    /// responses by id in whatever order they arrive.
    std::vector<SampleSet> exchange(const std::vector<QuboProblem>& problems);

    std::vector<std::string> command_;
    double timeout_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    std::uint64_t next_id_ = 1;
};

/// Backend by name: "exhaustive", "sa". The bridge needs a command and is
/// built directly.
std::unique_ptr<Sampler> make_sampler(const std::string& name, std::size_t exhaustive_capacity = 24);

}  // namespace qafem
