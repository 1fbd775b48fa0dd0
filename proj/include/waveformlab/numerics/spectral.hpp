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

#include <algorithm>
#include <cmath>

namespace wfl {

/// Eigenvalue bounds of H H^H.
struct SpectralBounds {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

/// Power iteration on H^H H for the largest eigenvalue of H H^H. The lower
/// bound is reported as 0, which holds for every channel.
///
/// Stops once the Rayleigh quotient changes by less than `rel_tol` between
/// sweeps or after `iters` sweeps. The start vector comes from a fixed seed so
/// the result is deterministic.
template <LinearOperator Op>
SpectralBounds spectral_bounds(const Op& h, int iters = 200, double rel_tol = 1e-6) {
    const auto n = static_cast<std::size_t>(h.cols());
    if (n == 0) return {};
    Rng rng(0x5eed5eedULL);
    cvec v = rng.complex_normal_vector(n, 1.0);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < std::max(iters, 1); ++it) {
        cvec w = h.apply_adjoint(h.apply(v));
        const double next = std::real(v.dot(w));
        const double norm = w.norm();
        if (norm == 0.0) return {0.0, 0.0};
        v = w / norm;
        const bool settled = it > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next);
        lambda = next;
        if (settled) break;
    }
    return {0.0, std::max(lambda, 0.0)};
}

}  // namespace wfl
