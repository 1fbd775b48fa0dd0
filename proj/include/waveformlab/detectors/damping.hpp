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

#include "waveformlab/numerics/types.hpp"

#include <Eigen/Eigenvalues>

#include <span>

namespace wfl {

struct DampingResult {
    rvec zeta;              // weights, sum to one
    double variance = 0.0;  // zeta^T V zeta
    bool fallback = false;  // single candidate chosen
};

/// Minimum-variance affine combination of candidates with error covariance V:
/// zeta = V^{-1} 1 / (1^T V^{-1} 1).
///
/// When V has condition number above `max_condition`, or the solution is not a
/// minimum, the weights select the single candidate with the smallest
/// diagonal variance.
inline DampingResult damping_weights(const rmat& v, double max_condition = 1e8) {
    const auto d = v.rows();
    detail::require(d >= 1 && v.cols() == d, "damping_weights: V must be square and nonempty");
    DampingResult out;
    if (d == 1) {
        out.zeta = rvec::Ones(1);
        out.variance = v(0, 0);
        return out;
    }
    const rmat sym = 0.5 * (v + v.transpose());
    Eigen::SelfAdjointEigenSolver<rmat> eig(sym);
    const rvec lam = eig.eigenvalues();
    const double lo = lam.minCoeff();
    const double hi = lam.cwiseAbs().maxCoeff();
    bool ok = lo > 0.0 && hi > 0.0 && hi / lo <= max_condition;
    if (ok) {
        const rvec sol = eig.eigenvectors() * (eig.eigenvectors().transpose() * rvec::Ones(d)).cwiseQuotient(lam);
        const double denom = sol.sum();
        ok = denom > 0.0 && std::isfinite(denom);
        if (ok) {
            out.zeta = sol / denom;
            out.variance = out.zeta.dot(sym * out.zeta);
        }
    }
    if (!ok) {
        Eigen::Index best = 0;
        sym.diagonal().minCoeff(&best);
        out.zeta = rvec::Zero(d);
        out.zeta[best] = 1.0;
        out.variance = sym(best, best);
        out.fallback = true;
    }
    return out;
}

struct DampedEstimate {
    cvec x;
    DampingResult weights;
};

/// x = [candidates] * zeta.
inline DampedEstimate damp(std::span<const cvec> candidates, const rmat& v, double max_condition = 1e8) {
    detail::require(!candidates.empty() && static_cast<Eigen::Index>(candidates.size()) == v.rows(),
                    "damp: candidate count must match V");
    DampedEstimate out{cvec::Zero(candidates.front().size()), damping_weights(v, max_condition)};
    for (std::size_t k = 0; k < candidates.size(); ++k) out.x += out.weights.zeta[static_cast<Eigen::Index>(k)] * candidates[k];
    return out;
}

}  // namespace wfl
