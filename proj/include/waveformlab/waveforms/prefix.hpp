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

#include "waveformlab/waveforms/scheme.hpp"

namespace wfl {

/// Prepend `cp_len` guard samples: the block tail, with the chirp phase for
/// AFDM. `channel_memory` (P - 1) is checked when given.
inline cvec add_prefix(const Scheme& scheme, const cvec& x, std::size_t cp_len, std::size_t channel_memory = 0) {
    detail::require_size(static_cast<std::size_t>(x.size()), scheme.size(), "add_prefix");
    detail::require(cp_len >= channel_memory, "add_prefix: prefix shorter than channel memory");
    detail::require(cp_len <= scheme.size(), "add_prefix: prefix longer than the block");
    const auto n = static_cast<Eigen::Index>(scheme.size());
    const auto cp = static_cast<Eigen::Index>(cp_len);
    const PrefixRule rule = scheme.prefix_rule();
    cvec out(n + cp);
    for (Eigen::Index m = 1; m <= cp; ++m) {
        out[cp - m] = x[n - m] * rule.wrap_phase(scheme.size(), -m);
    }
    out.tail(n) = x;
    return out;
}

inline cvec remove_prefix(const Scheme& scheme, const cvec& r, std::size_t cp_len) {
    detail::require_size(static_cast<std::size_t>(r.size()), scheme.size() + cp_len, "remove_prefix");
    return r.tail(static_cast<Eigen::Index>(scheme.size()));
}

}  // namespace wfl
