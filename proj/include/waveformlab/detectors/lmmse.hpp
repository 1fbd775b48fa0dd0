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

#include "waveformlab/waveforms/effective_channel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <stdexcept>

namespace wfl {

/// s_hat = H^H (H H^H + sigma2 I)^{-1} y for a unit-power prior, with H dense.
inline cvec lmmse_solve(const cmat& h, const cvec& y, double sigma2) {
    detail::require(static_cast<Eigen::Index>(y.size()) == h.rows(), "lmmse_detect: dimension mismatch");
    cmat gram = h * h.adjoint();
    if (sigma2 <= 0.0) {
        Eigen::FullPivLU<cmat> lu(gram);
        if (!lu.isInvertible()) throw std::runtime_error("lmmse_detect: singular system at zero noise variance");
        return h.adjoint() * lu.solve(y);
    }
    gram.diagonal().array() += sigma2;
    Eigen::LLT<cmat> llt(gram);
    if (llt.info() != Eigen::Success) throw std::runtime_error("lmmse_detect: factorization failed");
    return h.adjoint() * llt.solve(y);
}

/// LMMSE on the effective channel. Diagonal channels are equalized per
/// subcarrier; others are materialized (O(N^3)).
inline cvec lmmse_detect(const EffectiveChannel& heff, const cvec& y_hat, double sigma2) {
    detail::require(static_cast<std::size_t>(y_hat.size()) == heff.rows(), "lmmse_detect: dimension mismatch");
    if (heff.form() == EffectiveForm::diagonal) {
        const cvec& d = heff.diagonal();
        cvec out(y_hat.size());
        for (Eigen::Index k = 0; k < y_hat.size(); ++k) {
            const double den = std::norm(d[k]) + sigma2;
            if (den <= 0.0) throw std::runtime_error("lmmse_detect: singular system at zero noise variance");
            out[k] = std::conj(d[k]) * y_hat[k] / den;
        }
        return out;
    }
    return lmmse_solve(heff.to_dense(), y_hat, sigma2);
}

}  // namespace wfl
