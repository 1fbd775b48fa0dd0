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

#include "waveformlab/channel/mimo_channel.hpp"
#include "waveformlab/waveforms/scheme.hpp"

#include <cmath>

namespace wfl {

enum class EffectiveForm { diagonal, composition };

/// Channel seen between symbol vectors: H_eff = U_rx^{-1} H U_tx.
///
/// OFDM over a static SISO channel collapses to the diagonal Lambda; every
/// other combination stays an operator composition that is applied through
/// the transforms and can be materialized for small N.
class EffectiveChannel {
public:
    EffectiveChannel(const Scheme& scheme, MimoChannel h)
        : h_(std::move(h)), tx_(scheme, h_.num_tx()), rx_(scheme, h_.num_rx()) {
        detail::require(scheme.size() == h_.block_len(), "effective_channel: scheme and channel disagree on N");
        if (scheme.kind() == SchemeKind::ofdm && h_.num_tx() == 1 && h_.num_rx() == 1 && h_.time_invariant()) {
            form_ = EffectiveForm::diagonal;
            const auto n = static_cast<Eigen::Index>(h_.block_len());
            cvec first_col = cvec::Zero(n);
            const TimeChannel& b = h_.block(0, 0);
            for (std::size_t p = 0; p < b.tap_count(); ++p) {
                first_col[static_cast<Eigen::Index>(p)] += b.coefficient(p, p);
            }
            diag_ = unitary_fft(first_col, false) * std::sqrt(static_cast<double>(n));
        }
    }

    EffectiveForm form() const { return form_; }
    const cvec& diagonal() const { return diag_; }
    const MimoChannel& time_channel() const { return h_; }
    const SegmentedScheme& tx() const { return tx_; }
    const SegmentedScheme& rx() const { return rx_; }

    std::size_t rows() const { return rx_.size(); }
    std::size_t cols() const { return tx_.size(); }

    cvec apply(const cvec& s) const {
        if (form_ == EffectiveForm::diagonal) return diag_.cwiseProduct(s);
        return rx_.demodulate(h_.apply(tx_.modulate(s)));
    }

    cvec apply_adjoint(const cvec& v) const {
        if (form_ == EffectiveForm::diagonal) return diag_.conjugate().cwiseProduct(v);
        // U^{-1} = U^H for every scheme
        return tx_.demodulate(h_.apply_adjoint(rx_.modulate(v)));
    }

    cmat to_dense() const {
        if (form_ == EffectiveForm::diagonal) return diag_.asDiagonal();
        return materialize(*this);
    }

private:
    MimoChannel h_;
    SegmentedScheme tx_;
    SegmentedScheme rx_;
    EffectiveForm form_ = EffectiveForm::composition;
    cvec diag_;
};

inline EffectiveChannel effective_channel(const Scheme& scheme, const TimeChannel& h) {
    return {scheme, MimoChannel(h)};
}

inline EffectiveChannel effective_channel(const Scheme& scheme, const MimoChannel& h) { return {scheme, h}; }

}  // namespace wfl
