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
#include <vector>

namespace wfl {

inline constexpr double speed_of_light = 299792458.0;

/// Overall transmit-receive pulse response (raised cosine from an RRC pair).
struct PulseShape {
    double rolloff = 0.4;
    int span = 4;                   // truncation, in sample intervals each side
    double sample_interval = 1.0;   // seconds
};

/// Raised cosine p(t) = sinc(t/T) cos(pi b t/T) / (1 - (2 b t/T)^2), zero
/// beyond +-span*T. At |t| = T/(2b) the analytic limit (pi/4) sinc(1/(2b)) is
/// used.
inline double raised_cosine(double t, const PulseShape& shape) {
    const double x = t / shape.sample_interval;
    if (shape.span > 0 && std::abs(x) > static_cast<double>(shape.span) + 1e-12) return 0.0;
    const auto sinc = [](double u) { return u == 0.0 ? 1.0 : std::sin(pi * u) / (pi * u); };
    const double b = shape.rolloff;
    if (b <= 0.0) return sinc(x);
    const double d = 2.0 * b * x;
    if (std::abs(std::abs(d) - 1.0) < 1e-10) return (pi / 4.0) * sinc(1.0 / (2.0 * b));
    return sinc(x) * std::cos(pi * b * x) / (1.0 - d * d);
}

struct Path {
    cplx gain;
    double doppler = 0.0;  // Hz
    double delay = 0.0;    // seconds
};

struct PathSet {
    std::vector<Path> paths;
    double sample_interval = 1.0;
    double nu_max = 0.0;

    std::size_t size() const { return paths.size(); }
    double max_delay() const {
        double d = 0.0;
        for (const auto& p : paths) d = std::max(d, p.delay);
        return d;
    }
    bool on_sample_grid() const {
        return std::all_of(paths.begin(), paths.end(), [&](const Path& p) {
            const double k = p.delay / sample_interval;
            return std::abs(k - std::round(k)) < 1e-9;
        });
    }
};

enum class DelayProfile { equal, exponential };

struct PathModel {
    int num_paths = 6;
    double tau_max_samples = 5.0;
    double velocity_kmh = 0.0;
    double carrier_hz = 4e9;
    double sample_interval = 1.0;
    DelayProfile profile = DelayProfile::equal;
    double decay_samples = 2.0;      // exponential profile constant
    bool fractional_delays = false;
};

/// Maximum Doppler shift v * fc / c.
inline double max_doppler(double velocity_kmh, double carrier_hz) {
    return velocity_kmh / 3.6 * carrier_hz / speed_of_light;
}

/// Draw a multipath realization.
///
/// Dopplers follow the Jakes angle model f = nu_max cos(2 pi u). Delays are
/// uniform on {0, Ts, ..., tau_max} (or on [0, tau_max] with fractional
/// delays). Gains are CN(0, w_i) with weights summing to one.
inline PathSet generate_paths(const PathModel& model, std::size_t block_len, Rng& rng) {
    detail::require(model.num_paths >= 1, "generate_paths: need at least one path");
    detail::require(model.tau_max_samples >= 0.0, "generate_paths: negative tau_max");
    detail::require(model.tau_max_samples < static_cast<double>(block_len),
                    "generate_paths: tau_max must be shorter than the block length");
    PathSet set;
    set.sample_interval = model.sample_interval;
    set.nu_max = max_doppler(model.velocity_kmh, model.carrier_hz);
    const auto grid = static_cast<std::uint64_t>(std::floor(model.tau_max_samples)) + 1;

    std::vector<double> delays(static_cast<std::size_t>(model.num_paths));
    std::vector<double> dopplers(delays.size());
    for (std::size_t i = 0; i < delays.size(); ++i) {
        const double tau = model.fractional_delays ? rng.uniform01() * model.tau_max_samples
                                                   : static_cast<double>(rng.uniform_below(grid));
        delays[i] = tau * model.sample_interval;
        dopplers[i] = set.nu_max == 0.0 ? 0.0 : set.nu_max * std::cos(2.0 * pi * rng.uniform01());
    }

    std::vector<double> weights(delays.size(), 1.0);
    if (model.profile == DelayProfile::exponential) {
        for (std::size_t i = 0; i < delays.size(); ++i) {
            weights[i] = std::exp(-delays[i] / (model.decay_samples * model.sample_interval));
        }
    }
    double total = 0.0;
    for (double w : weights) total += w;

    set.paths.reserve(delays.size());
    for (std::size_t i = 0; i < delays.size(); ++i) {
        set.paths.push_back({rng.complex_normal(weights[i] / total), dopplers[i], delays[i]});
    }
    return set;
}

/// g[n, p] = sum_i h_i e^{j 2 pi f_i (n - p) Ts} p_rc(p Ts - tau_i).
inline cplx impulse_response(const PathSet& paths, const PulseShape& shape, long n, long p) {
    detail::require(p >= 0, "impulse_response: tap index out of range");
    const double ts = paths.sample_interval;
    cplx g{0.0, 0.0};
    for (const auto& path : paths.paths) {
        const double pulse = raised_cosine(static_cast<double>(p) * ts - path.delay, shape);
        if (pulse == 0.0) continue;
        const double phase = 2.0 * pi * path.doppler * static_cast<double>(n - p) * ts;
        g += path.gain * std::polar(pulse, phase);
    }
    return g;
}

/// Number of channel taps: max delay + 1 on the sample grid; off-grid delays
/// also keep the causal pulse tail up to `span` samples.
inline std::size_t tap_count(const PathSet& paths, const PulseShape& shape) {
    const double d = paths.max_delay() / paths.sample_interval;
    if (paths.on_sample_grid()) return static_cast<std::size_t>(std::llround(d)) + 1;
    return static_cast<std::size_t>(std::ceil(d)) + static_cast<std::size_t>(std::max(shape.span, 0)) + 1;
}

}  // namespace wfl
