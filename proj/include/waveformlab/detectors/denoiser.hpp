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

#include "waveformlab/detectors/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace wfl {

/// Input variances below this are treated as this value.
inline constexpr double min_denoiser_variance = 1e-12;

struct DenoiseResult {
    cvec mean;
    double variance = 0.0;  // average per-entry posterior variance
};

/// Symbol-wise posterior mean of s uniform on the constellation given
/// r = s + CN(0, v).
inline DenoiseResult mmse_denoise(const cvec& r, double v, const Constellation& c) {
    const double var = std::max(v, min_denoiser_variance);
    const auto& pts = c.points();
    std::vector<double> logw(pts.size());
    DenoiseResult out{cvec(r.size()), 0.0};
    double total_var = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < pts.size(); ++k) {
            logw[k] = -std::norm(r[i] - pts[k]) / var;
            peak = std::max(peak, logw[k]);
        }
        double z = 0.0;
        cplx m{0.0, 0.0};
        double e2 = 0.0;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double w = std::exp(logw[k] - peak);
            z += w;
            m += w * pts[k];
            e2 += w * std::norm(pts[k]);
        }
        m /= z;
        out.mean[i] = m;
        total_var += std::max(e2 / z - std::norm(m), 0.0);
    }
    out.variance = r.size() > 0 ? total_var / static_cast<double>(r.size()) : 0.0;
    return out;
}

}  // namespace wfl
