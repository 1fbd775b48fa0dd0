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

#include "waveformlab/channel/time_channel.hpp"

#include <vector>

namespace wfl {

/// Block channel: receive antenna m sees sum_j H_{m,j} x_j, every block N x N.
/// Stacked it is an (Nr N) x (Nt N) operator acting on [x_1; ...; x_Nt].
class MimoChannel {
public:
    MimoChannel() = default;

    MimoChannel(std::size_t nr, std::size_t nt, std::vector<TimeChannel> blocks)
        : nr_(nr), nt_(nt), blocks_(std::move(blocks)) {
        detail::require(nr_ >= 1 && nt_ >= 1, "MimoChannel: antenna counts must be positive");
        detail::require(blocks_.size() == nr_ * nt_, "MimoChannel: expected Nr x Nt blocks");
        n_ = blocks_.front().block_len();
        for (const auto& b : blocks_) detail::require(b.block_len() == n_, "MimoChannel: inconsistent block length N");
    }

    /// SISO view.
    explicit MimoChannel(TimeChannel single) : MimoChannel(1, 1, std::vector<TimeChannel>{std::move(single)}) {}

    std::size_t num_rx() const { return nr_; }
    std::size_t num_tx() const { return nt_; }
    std::size_t block_len() const { return n_; }
    std::size_t rows() const { return nr_ * n_; }
    std::size_t cols() const { return nt_ * n_; }
    const TimeChannel& block(std::size_t m, std::size_t j) const { return blocks_[m * nt_ + j]; }

    bool time_invariant() const {
        for (const auto& b : blocks_) {
            if (!b.time_invariant()) return false;
        }
        return true;
    }

    cvec apply(const cvec& x) const {
        detail::require_size(static_cast<std::size_t>(x.size()), cols(), "MimoChannel::apply");
        const auto n = static_cast<Eigen::Index>(n_);
        cvec y = cvec::Zero(static_cast<Eigen::Index>(rows()));
        for (std::size_t m = 0; m < nr_; ++m) {
            for (std::size_t j = 0; j < nt_; ++j) {
                y.segment(static_cast<Eigen::Index>(m) * n, n) +=
                    block(m, j).apply(x.segment(static_cast<Eigen::Index>(j) * n, n));
            }
        }
        return y;
    }

    cvec apply_adjoint(const cvec& y) const {
        detail::require_size(static_cast<std::size_t>(y.size()), rows(), "MimoChannel::apply_adjoint");
        const auto n = static_cast<Eigen::Index>(n_);
        cvec x = cvec::Zero(static_cast<Eigen::Index>(cols()));
        for (std::size_t m = 0; m < nr_; ++m) {
            for (std::size_t j = 0; j < nt_; ++j) {
                x.segment(static_cast<Eigen::Index>(j) * n, n) +=
                    block(m, j).apply_adjoint(y.segment(static_cast<Eigen::Index>(m) * n, n));
            }
        }
        return x;
    }

    cmat to_dense() const {
        const auto n = static_cast<Eigen::Index>(n_);
        cmat h = cmat::Zero(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols()));
        for (std::size_t m = 0; m < nr_; ++m) {
            for (std::size_t j = 0; j < nt_; ++j) {
                h.block(static_cast<Eigen::Index>(m) * n, static_cast<Eigen::Index>(j) * n, n, n) = block(m, j).to_dense();
            }
        }
        return h;
    }

    sparse_cmat to_sparse() const {
        const auto n = static_cast<Eigen::Index>(n_);
        std::vector<Eigen::Triplet<cplx>> entries;
        for (std::size_t m = 0; m < nr_; ++m) {
            for (std::size_t j = 0; j < nt_; ++j) {
                const sparse_cmat b = block(m, j).to_sparse();
                for (Eigen::Index row = 0; row < b.outerSize(); ++row) {
                    for (sparse_cmat::InnerIterator it(b, row); it; ++it) {
                        entries.emplace_back(static_cast<Eigen::Index>(m) * n + it.row(),
                                             static_cast<Eigen::Index>(j) * n + it.col(), it.value());
                    }
                }
            }
        }
        sparse_cmat h(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols()));
        h.setFromTriplets(entries.begin(), entries.end());
        return h;
    }

private:
    std::size_t nr_ = 0;
    std::size_t nt_ = 0;
    std::size_t n_ = 0;
    std::vector<TimeChannel> blocks_;
};

/// Assemble the block channel from an Nr x Nt grid of path sets (row-major,
/// receive antenna outer). Each pair keeps its own tap count.
inline MimoChannel build_mimo_channel(const std::vector<PathSet>& path_grid, std::size_t nr, std::size_t nt,
                                      const PulseShape& shape, std::size_t block_len, PrefixRule rule = {}) {
    detail::require(path_grid.size() == nr * nt, "build_mimo_channel: path grid must hold Nr x Nt entries");
    std::vector<TimeChannel> blocks;
    blocks.reserve(path_grid.size());
    for (const auto& paths : path_grid) blocks.push_back(build_time_channel(paths, shape, block_len, rule));
    return {nr, nt, std::move(blocks)};
}

}  // namespace wfl
