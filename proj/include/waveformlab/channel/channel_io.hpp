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

// Channel dump format:
//   {"N": 16, "P": 3, "cp_mode": "cyclic" | "chirp-periodic", "c1": 0.0,
//    "taps": [[n, p, re, im], ...]}

#include "waveformlab/channel/time_channel.hpp"

#include "json.hpp"

#include <string>

namespace wfl {

inline nlohmann::json channel_to_json(const TimeChannel& h) {
    nlohmann::json taps = nlohmann::json::array();
    for (Eigen::Index n = 0; n < h.taps().rows(); ++n) {
        for (Eigen::Index p = 0; p < h.taps().cols(); ++p) {
            const cplx g = h.taps()(n, p);
            taps.push_back({n, p, g.real(), g.imag()});
        }
    }
    return {
        {"N", h.block_len()},
        {"P", h.tap_count()},
        {"cp_mode", h.prefix_rule().mode == PrefixMode::cyclic ? "cyclic" : "chirp-periodic"},
        {"c1", h.prefix_rule().c1},
        {"taps", std::move(taps)},
    };
}

inline TimeChannel channel_from_json(const nlohmann::json& j) {
    const auto n = j.at("N").get<std::size_t>();
    const auto p = j.at("P").get<std::size_t>();
    const auto mode = j.at("cp_mode").get<std::string>();
    detail::require(mode == "cyclic" || mode == "chirp-periodic", "channel_from_json: unknown cp_mode " + mode);
    PrefixRule rule{mode == "cyclic" ? PrefixMode::cyclic : PrefixMode::chirp_periodic, j.value("c1", 0.0)};
    cmat taps = cmat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (const auto& entry : j.at("taps")) {
        const auto row = entry.at(0).get<std::size_t>();
        const auto col = entry.at(1).get<std::size_t>();
        detail::require(row < n && col < p, "channel_from_json: tap index out of range");
        taps(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = {entry.at(2).get<double>(), entry.at(3).get<double>()};
    }
    return {std::move(taps), rule};
}

}  // namespace wfl
