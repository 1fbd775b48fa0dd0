// SPDX-License-Identifier: Apache-2.0
//
// waveformlab: multicarrier waveform and iterative detector simulation
// Copyright (C) 2026 The waveformlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wfl {

using cplx = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using rvec = Eigen::VectorXd;
using rmat = Eigen::MatrixXd;
using sparse_cmat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx j1{0.0, 1.0};

/// A linear map with a matching adjoint. Channels, effective channels and
/// dense test matrices all model this.
template <class Op>
concept LinearOperator = requires(const Op& op, const cvec& v) {
    { op.rows() } -> std::convertible_to<std::size_t>;
    { op.cols() } -> std::convertible_to<std::size_t>;
    { op.apply(v) } -> std::convertible_to<cvec>;
    { op.apply_adjoint(v) } -> std::convertible_to<cvec>;
};

/// Dense matrix adapter so plain matrices can stand in for channels.
class DenseOperator {
public:
    DenseOperator() = default;
    explicit DenseOperator(cmat m) : m_(std::move(m)) {}

    std::size_t rows() const { return static_cast<std::size_t>(m_.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(m_.cols()); }
    cvec apply(const cvec& v) const { return m_ * v; }
    cvec apply_adjoint(const cvec& v) const { return m_.adjoint() * v; }
    const cmat& matrix() const { return m_; }
    cmat to_dense() const { return m_; }
    sparse_cmat to_sparse() const { return m_.sparseView(); }

private:
    cmat m_;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

inline void require_size(std::size_t got, std::size_t want, const char* where) {
    if (got != want) {
        throw std::invalid_argument(std::string(where) + ": length " + std::to_string(got) +
                                    " does not match configured size " + std::to_string(want));
    }
}

}  // namespace detail

/// Materialize any operator column by column.
template <LinearOperator Op>
cmat materialize(const Op& op) {
    const auto n = static_cast<Eigen::Index>(op.cols());
    cmat out(static_cast<Eigen::Index>(op.rows()), n);
    cvec e = cvec::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        e[k] = 1.0;
        out.col(k) = op.apply(e);
        e[k] = 0.0;
    }
    return out;
}

}  // namespace wfl
