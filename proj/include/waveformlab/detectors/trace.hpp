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

#include "json.hpp"

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace wfl {

struct IterationRecord {
    int t = 0;
    double v_gamma = 0.0;   // linear-step output variance
    double v_post = 0.0;    // denoiser posterior variance
    double v_phi = 0.0;     // variance of the estimate fed to the next step
    std::vector<double> zeta;
    std::optional<double> max_error_corr;  // needs ground truth
    std::optional<double> ks_pre;
    std::optional<double> ks_stat;
    double micros = 0.0;
};

struct DetectorTrace {
    std::vector<IterationRecord> iterations;
    bool converged = false;
    bool degenerate = false;  // coefficient breakdown ended the recursion
    int returned_iteration = 0;

    std::size_t size() const { return iterations.size(); }
};

/// One JSON object per iteration:
///   {"t", "v_gamma", "v_phi", "zeta", "ks_stat"?, "micros"}
inline void write_trace_jsonl(std::ostream& os, const DetectorTrace& trace) {
    for (const auto& it : trace.iterations) {
        nlohmann::json j{{"t", it.t}, {"v_gamma", it.v_gamma}, {"v_phi", it.v_phi}, {"zeta", it.zeta}, {"micros", it.micros}};
        if (it.ks_stat) j["ks_stat"] = *it.ks_stat;
        os << j.dump() << '\n';
    }
}

/// Internal vectors of one iteration, for probes and plots.
struct IterationView {
    int t;
    const cvec& r_time;    // linear-step output, time domain
    const cvec& r_signal;  // after the inverse transform
    double v_gamma;
    std::span<const cvec> inputs;  // estimates x_1..x_t fed to the linear step
};

struct DetectOptions {
    const cvec* truth_symbols = nullptr;  // enables correlation / KS diagnostics
    std::function<void(const IterationView&)> observer;
};

struct DetectResult {
    cvec decisions;       // nearest constellation points
    cvec posterior_mean;
    DetectorTrace trace;
};

}  // namespace wfl
