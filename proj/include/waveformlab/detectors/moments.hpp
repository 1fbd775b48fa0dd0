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

#include "waveformlab/numerics/rng.hpp"
#include "waveformlab/numerics/types.hpp"

#include <Eigen/Eigenvalues>

#include <cstdint>
#include <vector>

namespace wfl {

namespace detail {

/// Compressed rows with unsorted column indices; enough for the moment products.
struct RowSparse {
    std::size_t cols = 0;
    std::vector<std::size_t> ptr{0};
    std::vector<std::size_t> idx;
    std::vector<cplx> val;

    RowSparse() = default;
    explicit RowSparse(const sparse_cmat& m) : cols(static_cast<std::size_t>(m.cols())) {
        for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
            for (sparse_cmat::InnerIterator it(m, r); it; ++it) {
                idx.push_back(static_cast<std::size_t>(it.col()));
                val.push_back(it.value());
            }
            ptr.push_back(idx.size());
        }
    }

    std::size_t rows() const { return ptr.size() - 1; }
    std::size_t nnz() const { return idx.size(); }
    double frobenius2() const {
        double s = 0.0;
        for (const auto& v : val) s += std::norm(v);
        return s;
    }
};

struct SparseAccumulator {
    explicit SparseAccumulator(std::size_t n) : dense(n, cplx{}), seen(n, 0) {}
    std::vector<cplx> dense;
    std::vector<unsigned char> seen;
    std::vector<std::size_t> touched;
};

/// alpha * A B + beta * C, row by row.
inline RowSparse multiply(const RowSparse& a, const RowSparse& b, SparseAccumulator& acc, double alpha = 1.0,
                          const RowSparse* c = nullptr, double beta = 0.0) {
    RowSparse out;
    out.cols = b.cols;
    out.ptr.reserve(a.rows() + 1);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const auto add = [&](std::size_t col, cplx v) {
            if (!acc.seen[col]) {
                acc.seen[col] = 1;
                acc.touched.push_back(col);
            }
            acc.dense[col] += v;
        };
        if (c) {
            for (std::size_t q = c->ptr[r]; q < c->ptr[r + 1]; ++q) add(c->idx[q], beta * c->val[q]);
        }
        for (std::size_t p = a.ptr[r]; p < a.ptr[r + 1]; ++p) {
            const cplx av = alpha * a.val[p];
            const std::size_t k = a.idx[p];
            for (std::size_t q = b.ptr[k]; q < b.ptr[k + 1]; ++q) add(b.idx[q], av * b.val[q]);
        }
        for (std::size_t col : acc.touched) {
            if (acc.dense[col] != cplx{}) {
                out.idx.push_back(col);
                out.val.push_back(acc.dense[col]);
            }
            acc.dense[col] = cplx{};
            acc.seen[col] = 0;
        }
        acc.touched.clear();
        out.ptr.push_back(out.idx.size());
    }
    return out;
}

}  // namespace detail

struct MomentOptions {
    std::size_t exact_dim = 32;         // dense evaluation up to this many rows
    std::size_t sparse_row_budget = 48; // exact sparse orders while nnz/row of B^a H stays below this
    int probes = 8;                     // Hutchinson probes for the remaining orders
    std::uint64_t seed = 0x7e57ULL;
};

/// Trace moments w_k = tr(H H^H B^k) / n_cols, B = lambda_dagger I - H H^H,
/// for k = 0..count-1.
///
/// Small operators are evaluated densely. Larger ones use exact sparse
/// products of B^a H for the low orders (while the band stays narrow) and Hutchinson
/// estimates with unit-modulus random-phase probes for the rest.
template <LinearOperator Op>
std::vector<double> trace_moments(const Op& h, double lambda_dagger, std::size_t count, const MomentOptions& opt = {}) {
    std::vector<double> w(count, 0.0);
    if (count == 0) return w;
    const auto rows = static_cast<Eigen::Index>(h.rows());
    const double inv_cols = 1.0 / static_cast<double>(h.cols());

    if (h.rows() <= opt.exact_dim) {
        const cmat hd = materialize(h);
        const Eigen::SelfAdjointEigenSolver<cmat> eig(hd * hd.adjoint(), Eigen::EigenvaluesOnly);
        const rvec lam = eig.eigenvalues();
        rvec pw = lam;
        for (std::size_t k = 0; k < count; ++k) {
            w[k] = pw.sum() * inv_cols;
            pw.array() *= lambda_dagger - lam.array();
        }
        return w;
    }

    std::size_t exact_orders = 0;
    if constexpr (requires { h.to_sparse(); }) {
        // G_a = B^a H gives w_2a = ||G_a||^2 and w_2a+1 = lambda ||G_a||^2 - ||H^H G_a||^2.
        const detail::RowSparse hs(h.to_sparse());
        const detail::RowSparse ha(sparse_cmat(h.to_sparse().adjoint()));
        detail::RowSparse g = hs;
        detail::SparseAccumulator acc(std::max(h.rows(), h.cols()));
        const std::size_t budget = opt.sparse_row_budget * h.rows();
        while (exact_orders < count && g.nnz() <= budget) {
            const double g2 = g.frobenius2();
            w[exact_orders++] = g2 * inv_cols;
            if (exact_orders == count) break;
            const detail::RowSparse k = detail::multiply(ha, g, acc);
            w[exact_orders++] = (lambda_dagger * g2 - k.frobenius2()) * inv_cols;
            if (exact_orders == count) break;
            g = detail::multiply(hs, k, acc, -1.0, &g, lambda_dagger);
        }
    }
    if (exact_orders == count) return w;

    Rng rng(opt.seed);
    std::vector<double> acc(count, 0.0);
    for (int probe = 0; probe < opt.probes; ++probe) {
        cvec z(rows);
        for (auto& v : z) v = std::polar(1.0, 2.0 * pi * rng.uniform01());
        const cvec cz = h.apply(h.apply_adjoint(z));
        cvec u = z;
        for (std::size_t k = 0; k < count; ++k) {
            if (k >= exact_orders) acc[k] += std::real(cz.dot(u));
            if (k + 1 < count) u = lambda_dagger * u - h.apply(h.apply_adjoint(u));
        }
    }
    for (std::size_t k = exact_orders; k < count; ++k) w[k] = acc[k] * inv_cols / opt.probes;
    return w;
}

}  // namespace wfl
