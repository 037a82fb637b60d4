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

#include "qafem/encoding.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "qafem/errors.hpp"

namespace qafem {

double QuadraticForm::operator()(const Eigen::VectorXd& z) const {
    if (z.size() != gradient.size()) throw ContractError("quadratic form size mismatch");
    return gradient.dot(z) + 0.5 * z.dot(hessian * z);
}

BinaryEncoding::BinaryEncoding(int bits, Eigen::VectorXd eps, Eigen::VectorXd base)
    : bits_(bits), eps_(std::move(eps)), base_(std::move(base)) {
    if (bits_ < 1 || bits_ > 30) throw InvalidArgumentError("qubits per variable must lie in [1, 30]");
    if (eps_.size() != base_.size()) throw ContractError("encoding eps and base sizes differ");
    for (Eigen::Index i = 0; i < eps_.size(); ++i) {
        if (!(eps_(i) >= 0.0) || !std::isfinite(eps_(i))) throw InvalidArgumentError("discretisation error must be finite and >= 0");
    }
}

BinaryEncoding BinaryEncoding::centred(int bits, const Eigen::VectorXd& eps, const Eigen::VectorXd& centre) {
    const double below = std::ldexp(1.0, bits - 1) - 1.0;
    return BinaryEncoding(bits, eps, centre - below * eps);
}

Eigen::VectorXd BinaryEncoding::centre() const {
    return base_ + (std::ldexp(1.0, bits_ - 1) - 1.0) * eps_;
}

Eigen::VectorXd BinaryEncoding::upper() const {
    return base_ + (std::ldexp(1.0, bits_) - 1.0) * eps_;
}

double BinaryEncoding::step(std::size_t i, int j) const {
    return std::ldexp(eps_(static_cast<Eigen::Index>(i)), j);
}

Eigen::VectorXd BinaryEncoding::decode(const Bits& b) const {
    if (b.size() != num_bits()) throw ContractError("bit-vector length does not match the encoding");
    Eigen::VectorXd z(eps_.size());
    for (Eigen::Index i = 0; i < eps_.size(); ++i) {
        std::uint64_t m = 0;
        for (int j = 0; j < bits_; ++j) {
            if (b[static_cast<std::size_t>(i) * static_cast<std::size_t>(bits_) + static_cast<std::size_t>(j)]) {
                m |= std::uint64_t{1} << j;
            }
        }
        z(i) = base_(i) + eps_(i) * static_cast<double>(m);
    }
    return z;
}

BoundUpdate update_bounds(double v, double v_min, double v_max, double eps, int bits) {
    if (!(v >= v_min && v <= v_max)) throw ContractError("update_bounds: current value outside its bounds");
    const double inf = std::numeric_limits<double>::infinity();
    const double levels = std::ldexp(1.0, bits) - 1.0;
    BoundUpdate u;
    u.z_min = std::max(v_min - v, -(std::ldexp(1.0, bits - 1) - 1.0) * eps);
    u.z_max = std::min(v_max - v, std::ldexp(1.0, bits - 1) * eps);
    while (v + u.z_min < v_min) u.z_min = std::nextafter(u.z_min, inf);
    while (v + u.z_max > v_max) u.z_max = std::nextafter(u.z_max, -inf);
    if (u.z_max < u.z_min) u.z_max = u.z_min;
    u.eps = (u.z_max - u.z_min) / levels;
    while (u.eps > 0.0 && v + (u.z_min + u.eps * levels) > v_max) u.eps = std::nextafter(u.eps, 0.0);
    u.centre = 0.5 * (u.z_min + u.z_max - u.eps);
    return u;
}

Qubo build_qubo(const QuadraticForm& model, const BinaryEncoding& encoding) {
    const auto n = static_cast<Eigen::Index>(encoding.num_variables());
    if (model.gradient.size() != n || model.hessian.rows() != n || model.hessian.cols() != n) {
        throw ContractError("quadratic model and encoding dimensions differ");
    }
    const int L = encoding.bits();
    const Eigen::VectorXd& a = encoding.base();
    const Eigen::VectorXd Ka = model.hessian * a;

    std::map<std::pair<std::size_t, std::size_t>, double> acc;
    for (Eigen::Index col = 0; col < model.hessian.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(model.hessian, col); it; ++it) {
            const auto i = static_cast<std::size_t>(it.row());
            const auto j = static_cast<std::size_t>(it.col());
            for (int p = 0; p < L; ++p) {
                const double dp = encoding.step(i, p);
                for (int q = 0; q < L; ++q) {
                    const double dq = encoding.step(j, q);
                    std::size_t P = i * static_cast<std::size_t>(L) + static_cast<std::size_t>(p);
                    std::size_t Q = j * static_cast<std::size_t>(L) + static_cast<std::size_t>(q);
                    if (P > Q) std::swap(P, Q);
                    acc[{P, Q}] += 0.5 * it.value() * dp * dq;
                }
            }
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const double lin = Ka(i) + model.gradient(i);
        for (int p = 0; p < L; ++p) {
            const std::size_t P = static_cast<std::size_t>(i) * static_cast<std::size_t>(L) + static_cast<std::size_t>(p);
            acc[{P, P}] += encoding.step(static_cast<std::size_t>(i), p) * lin;
        }
    }
    Qubo out;
    out.problem.size = encoding.num_bits();
    out.problem.entries.reserve(acc.size());
    for (const auto& [key, value] : acc) {
        if (value != 0.0) out.problem.entries.push_back({key.first, key.second, value});
    }
    out.offset = 0.5 * a.dot(Ka) + a.dot(model.gradient);
    return out;
}

}  // namespace qafem
