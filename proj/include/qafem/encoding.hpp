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

#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "qafem/sampler.hpp"

namespace qafem {

/// QF(z) = z^T g + 1/2 z^T K z with K symmetric (both triangles stored).
struct QuadraticForm {
    Eigen::VectorXd gradient;
    Eigen::SparseMatrix<double> hessian;

    double operator()(const Eigen::VectorXd& z) const;
    std::size_t size() const noexcept { return static_cast<std::size_t>(gradient.size()); }
};

/// Radix-2 encoding z_i = a_i + eps_i * sum_j b_{i,j} 2^j with L bits per
/// variable. Bits of variable i occupy positions [i*L, (i+1)*L).
class BinaryEncoding {
 public:
    BinaryEncoding(int bits, Eigen::VectorXd eps, Eigen::VectorXd base);

    /// Encoding centred on `centre`: base = centre - (2^(L-1) - 1) eps.
    static BinaryEncoding centred(int bits, const Eigen::VectorXd& eps, const Eigen::VectorXd& centre);

    int bits() const noexcept { return bits_; }
    std::size_t num_variables() const noexcept { return static_cast<std::size_t>(eps_.size()); }
    std::size_t num_bits() const noexcept { return num_variables() * static_cast<std::size_t>(bits_); }

    const Eigen::VectorXd& eps() const noexcept { return eps_; }
    /// a, the value decoded from all-zero bits.
    const Eigen::VectorXd& base() const noexcept { return base_; }
    Eigen::VectorXd centre() const;
    Eigen::VectorXd lower() const { return base_; }
    Eigen::VectorXd upper() const;
    /// Diagonal entry of D for bit j of variable i.
    double step(std::size_t i, int j) const;

    Eigen::VectorXd decode(const Bits& b) const;

 private:
    int bits_;
    Eigen::VectorXd eps_;
    Eigen::VectorXd base_;
};

struct BoundUpdate {
    double eps = 0.0;
    double centre = 0.0;
    double z_min = 0.0;
    double z_max = 0.0;
};

/// Clip the step range around v to the box [v_min, v_max] and rescale eps so
/// the 2^L grid spans the clipped range. Infinite bounds are allowed. The
/// range endpoints are adjusted to the last ulp so that every decoded step
/// keeps v + z inside the box in floating point.
BoundUpdate update_bounds(double v, double v_min, double v_max, double eps, int bits);

struct Qubo {
    QuboProblem problem;
    double offset = 0.0;  // 1/2 a^T K a + a^T g
};

/// b^T A b + offset = QF(a + D b) for every bit-vector b.
Qubo build_qubo(const QuadraticForm& model, const BinaryEncoding& encoding);

}  // namespace qafem
