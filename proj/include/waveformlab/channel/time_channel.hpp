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

#include "waveformlab/channel/paths.hpp"
#include "waveformlab/numerics/types.hpp"

#include <cmath>
#include <vector>

namespace wfl {

enum class PrefixMode { cyclic, chirp_periodic };

/// Guard-interval rule. For the chirp-periodic prefix the guard sample at
/// n = -m carries x[N - m] e^{-j 2 pi c1 (N^2 - 2 N m)}.
struct PrefixRule {
    PrefixMode mode = PrefixMode::cyclic;
    double c1 = 0.0;

    /// Phase applied to x[N + n] when it stands in for x[n], n < 0.
    cplx wrap_phase(std::size_t block_len, long n) const {
        if (mode == PrefixMode::cyclic) return 1.0;
        const auto nn = static_cast<double>(block_len);
        // reduce the argument modulo 1 before forming the exponential
        const double turns = std::fmod(c1 * (nn * nn + 2.0 * nn * static_cast<double>(n)), 1.0);
        return std::polar(1.0, -2.0 * pi * turns);
    }
};

/// Effective time-domain channel after prefix removal: row n holds g[n, p] at
/// column (n - p) mod N. Stored as N x P taps so products cost O(PN).
class TimeChannel {
public:
    TimeChannel() = default;

    TimeChannel(cmat taps, PrefixRule rule = {}) : taps_(std::move(taps)), rule_(rule) {
        detail::require(taps_.rows() > 0 && taps_.cols() > 0, "TimeChannel: empty tap matrix");
        detail::require(taps_.cols() <= taps_.rows(), "TimeChannel: tap count P exceeds block length N");
        const auto n = taps_.rows();
        coef_ = taps_;
        for (Eigen::Index row = 0; row < n; ++row) {
            for (Eigen::Index p = row + 1; p < taps_.cols(); ++p) coef_(row, p) *= rule_.wrap_phase(block_len(), row - p);
        }
        time_invariant_ = true;
        for (Eigen::Index row = 1; row < n && time_invariant_; ++row) {
            time_invariant_ = (taps_.row(row) - taps_.row(0)).cwiseAbs().maxCoeff() == 0.0;
        }
    }

    /// g[n, p] = value for every n, p; a convenience for tests.
    static TimeChannel static_taps(std::size_t n, const std::vector<cplx>& g, PrefixRule rule = {}) {
        cmat taps(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(g.size()));
        for (Eigen::Index p = 0; p < taps.cols(); ++p) taps.col(p).setConstant(g[static_cast<std::size_t>(p)]);
        return {std::move(taps), rule};
    }

    std::size_t block_len() const { return static_cast<std::size_t>(taps_.rows()); }
    std::size_t tap_count() const { return static_cast<std::size_t>(taps_.cols()); }
    std::size_t rows() const { return block_len(); }
    std::size_t cols() const { return block_len(); }
    const cmat& taps() const { return taps_; }
    const PrefixRule& prefix_rule() const { return rule_; }
    bool time_invariant() const { return time_invariant_; }

    /// Matrix entry at (n, (n - p) mod N).
    cplx coefficient(std::size_t n, std::size_t p) const {
        return coef_(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    }

    cvec apply(const cvec& x) const {
        detail::require_size(static_cast<std::size_t>(x.size()), block_len(), "TimeChannel::apply");
        const auto n = taps_.rows();
        const auto taps = taps_.cols();
        cvec y = cvec::Zero(n);
        for (Eigen::Index row = 0; row < n; ++row) {
            cplx acc{0.0, 0.0};
            for (Eigen::Index p = 0; p < taps; ++p) {
                Eigen::Index col = row - p;
                if (col < 0) col += n;
                acc += coef_(row, p) * x[col];
            }
            y[row] = acc;
        }
        return y;
    }

    cvec apply_adjoint(const cvec& y) const {
        detail::require_size(static_cast<std::size_t>(y.size()), block_len(), "TimeChannel::apply_adjoint");
        const auto n = taps_.rows();
        const auto taps = taps_.cols();
        cvec x = cvec::Zero(n);
        for (Eigen::Index row = 0; row < n; ++row) {
            for (Eigen::Index p = 0; p < taps; ++p) {
                Eigen::Index col = row - p;
                if (col < 0) col += n;
                x[col] += std::conj(coef_(row, p)) * y[row];
            }
        }
        return x;
    }

    cmat to_dense() const {
        const auto n = taps_.rows();
        cmat h = cmat::Zero(n, n);
        for (Eigen::Index row = 0; row < n; ++row) {
            for (Eigen::Index p = 0; p < taps_.cols(); ++p) {
                Eigen::Index col = row - p;
                if (col < 0) col += n;
                h(row, col) += coef_(row, p);
            }
        }
        return h;
    }

    sparse_cmat to_sparse() const {
        const auto n = taps_.rows();
        std::vector<Eigen::Triplet<cplx>> entries;
        entries.reserve(static_cast<std::size_t>(n * taps_.cols()));
        for (Eigen::Index row = 0; row < n; ++row) {
            for (Eigen::Index p = 0; p < taps_.cols(); ++p) {
                Eigen::Index col = row - p;
                if (col < 0) col += n;
                entries.emplace_back(row, col, coef_(row, p));
            }
        }
        sparse_cmat h(n, n);
        h.setFromTriplets(entries.begin(), entries.end());
        return h;
    }

    /// Time-varying linear convolution over a prefixed block of length
    /// cp_len + N. Output sample k corresponds to slot n = k - cp_len; guard
    /// slots reuse the first-row taps and are discarded after prefix removal.
    cvec propagate(const cvec& x_ext, std::size_t cp_len) const {
        detail::require_size(static_cast<std::size_t>(x_ext.size()), block_len() + cp_len, "TimeChannel::propagate");
        detail::require(cp_len + 1 >= tap_count(), "TimeChannel::propagate: prefix shorter than channel memory");
        const auto total = x_ext.size();
        const auto cp = static_cast<Eigen::Index>(cp_len);
        cvec r = cvec::Zero(total);
        for (Eigen::Index k = 0; k < total; ++k) {
            const Eigen::Index row = std::max<Eigen::Index>(k - cp, 0);
            cplx acc{0.0, 0.0};
            for (Eigen::Index p = 0; p < taps_.cols() && p <= k; ++p) acc += taps_(row, p) * x_ext[k - p];
            r[k] = acc;
        }
        return r;
    }

private:
    cmat taps_;
    cmat coef_;
    PrefixRule rule_;
    bool time_invariant_ = true;
};

/// Sample g[n, p] for n in [0, N), p in [0, P) from a path set.
inline TimeChannel build_time_channel(const PathSet& paths, const PulseShape& shape, std::size_t block_len,
                                      PrefixRule rule = {}) {
    const std::size_t p_count = tap_count(paths, shape);
    detail::require(p_count <= block_len, "build_time_channel: tap count P exceeds block length N");
    cmat taps(static_cast<Eigen::Index>(block_len), static_cast<Eigen::Index>(p_count));
    for (std::size_t n = 0; n < block_len; ++n) {
        for (std::size_t p = 0; p < p_count; ++p) {
            taps(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p)) =
                impulse_response(paths, shape, static_cast<long>(n), static_cast<long>(p));
        }
    }
    return {std::move(taps), rule};
}

}  // namespace wfl
