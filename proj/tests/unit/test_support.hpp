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

#include "waveformlab/waveformlab.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace wfl::test {

inline cvec random_vector(Rng& rng, std::size_t n, double variance = 1.0) { return rng.complex_normal_vector(n, variance); }

inline cmat random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double variance = 1.0) {
    cmat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (auto& v : m.reshaped()) v = rng.complex_normal(variance);
    return m;
}

inline double max_diff(const cvec& a, const cvec& b) { return (a - b).cwiseAbs().maxCoeff(); }
inline double max_diff(const cmat& a, const cmat& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// Unitary DFT evaluated term by term in long double.
inline cmat dft_oracle(std::size_t n, bool inverse = false) {
    using ld = long double;
    const ld sign = inverse ? 1.0L : -1.0L;
    const ld scale = 1.0L / std::sqrt(static_cast<ld>(n));
    cmat f(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t m = 0; m < n; ++m) {
            const ld a = sign * 2.0L * std::numbers::pi_v<ld> * static_cast<ld>((k * m) % n) / static_cast<ld>(n);
            f(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) =
                cplx(static_cast<double>(scale * std::cos(a)), static_cast<double>(scale * std::sin(a)));
        }
    }
    return f;
}

/// Permutation matrix with (P v)[i] = v[forward[i]].
inline cmat permutation_oracle(const std::vector<std::size_t>& forward) {
    const auto n = static_cast<Eigen::Index>(forward.size());
    cmat p = cmat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) p(i, static_cast<Eigen::Index>(forward[static_cast<std::size_t>(i)])) = 1.0;
    return p;
}

/// diag(e^{-j 2 pi c n^2})
inline cmat chirp_oracle(std::size_t n, double c) {
    cmat d = cmat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const long double a = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(c) *
                              static_cast<long double>(k * k);
        d(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) =
            cplx(static_cast<double>(std::cos(a)), static_cast<double>(std::sin(a)));
    }
    return d;
}

}  // namespace wfl::test
