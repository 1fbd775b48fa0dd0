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
#include "waveformlab/detectors/lmmse.hpp"
#include "waveformlab/detectors/mamp.hpp"
#include "waveformlab/detectors/oamp.hpp"
#include "waveformlab/harness/config.hpp"
#include "waveformlab/waveforms/effective_channel.hpp"
#include "waveformlab/waveforms/prefix.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <string>

namespace wfl {

/// Per-trial seed: identical across schemes and detectors so that every
/// combination sees the same bits, channel and noise.
inline std::uint64_t trial_seed(std::uint64_t base_seed, double snr_db, std::uint64_t trial_index) {
    return derive_seed(base_seed, std::bit_cast<std::uint64_t>(snr_db), trial_index);
}

inline double noise_variance(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

/// Everything a detector sees for one frame, plus the ground truth.
struct Frame {
    std::vector<std::uint8_t> bits;
    cvec symbols;     // Nt * N transmitted symbols
    Scheme scheme;    // may carry a per-frame permutation
    MimoChannel channel;
    cvec y;           // Nr * N received samples after prefix removal
    double sigma2 = 0.0;
};

/// Draw bits, channel and noise for (snr_db, trial_index) and push the frame
/// through prefix insertion, linear convolution and prefix removal.
inline Frame draw_frame(const SimConfig& cfg, const Scheme& scheme, double snr_db, std::uint64_t trial_index) {
    const std::uint64_t seed = trial_seed(cfg.seed, snr_db, trial_index);
    Rng rng(seed);
    const Constellation c = Constellation::make(cfg.modulation);
    const std::size_t n = cfg.n;

    std::vector<std::uint8_t> bits(cfg.nt * n * c.bits_per_symbol());
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (i % 64 == 0) word = rng.next_u64();
        bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1U);
    }
    cvec symbols = map_bits(bits, c);

    const PathModel model = cfg.path_model();
    std::vector<PathSet> grid;
    grid.reserve(cfg.nr * cfg.nt);
    for (std::size_t k = 0; k < cfg.nr * cfg.nt; ++k) grid.push_back(generate_paths(model, n, rng));

    Scheme frame_scheme = scheme;
    if (cfg.waveform.regenerate_permutation && scheme.kind() == SchemeKind::ifdm) {
        frame_scheme = Scheme(scheme.params(), random_permutation(n, derive_seed(seed, 0x1f)));
    }
    MimoChannel h = build_mimo_channel(grid, cfg.nr, cfg.nt, cfg.pulse(), n, frame_scheme.prefix_rule());

    const std::size_t cp = cfg.cp_len();
    const auto nn = static_cast<Eigen::Index>(n);
    std::vector<cvec> tx;
    tx.reserve(cfg.nt);
    for (std::size_t j = 0; j < cfg.nt; ++j) {
        const cvec x = frame_scheme.modulate(symbols.segment(static_cast<Eigen::Index>(j) * nn, nn));
        tx.push_back(add_prefix(frame_scheme, x, cp));
    }

    const double sigma2 = noise_variance(snr_db);
    cvec y(static_cast<Eigen::Index>(cfg.nr * n));
    for (std::size_t m = 0; m < cfg.nr; ++m) {
        cvec r = rng.complex_normal_vector(n + cp, sigma2);
        for (std::size_t j = 0; j < cfg.nt; ++j) r += h.block(m, j).propagate(tx[j], cp);
        y.segment(static_cast<Eigen::Index>(m) * nn, nn) = remove_prefix(frame_scheme, r, cp);
    }
    return {std::move(bits), std::move(symbols), std::move(frame_scheme), std::move(h), std::move(y), sigma2};
}

inline MampConfig mamp_config(const SimConfig& cfg, std::uint64_t moment_seed) {
    MampConfig m;
    m.max_iterations = cfg.iterations.max;
    m.tol = cfg.iterations.tol;
    m.damping_window = cfg.iterations.damping_window;
    m.moments.probes = cfg.iterations.probes;
    m.moments.seed = moment_seed;
    return m;
}

inline OampConfig oamp_config(const SimConfig& cfg) { return {cfg.iterations.max, cfg.iterations.tol}; }

struct TrialResult {
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
    int iterations = 0;
    double detect_micros = 0.0;
    bool converged = true;
    std::string error;  // detector failure; the frame then counts every bit as wrong
};

/// Run one detector on a drawn frame.
inline DetectResult detect_frame(const SimConfig& cfg, DetectorKind detector, const Frame& f, std::uint64_t moment_seed,
                                 const DetectOptions& opt = {}) {
    const Constellation c = Constellation::make(cfg.modulation);
    const SegmentedScheme u(f.scheme, cfg.nt);
    switch (detector) {
        case DetectorKind::lmmse: {
            const EffectiveChannel heff(f.scheme, f.channel);
            const cvec y_hat = heff.rx().demodulate(f.y);
            DetectResult r;
            r.posterior_mean = lmmse_detect(heff, y_hat, f.sigma2);
            r.decisions = detail::hard_decisions(r.posterior_mean, c);
            r.trace.converged = true;
            return r;
        }
        case DetectorKind::cd_oamp: return cd_oamp_detect(u, f.channel, f.y, f.sigma2, c, oamp_config(cfg), opt);
        case DetectorKind::cd_mamp:
            return cd_mamp_detect(u, f.channel, f.y, f.sigma2, c, mamp_config(cfg, moment_seed), opt);
    }
    throw std::logic_error("detect_frame: unknown detector");
}

/// One replayable trial: everything derives from (cfg.seed, snr_db, trial_index).
inline TrialResult run_trial(const SimConfig& cfg, const Scheme& scheme, DetectorKind detector, double snr_db,
                             std::uint64_t trial_index) {
    const Frame f = draw_frame(cfg, scheme, snr_db, trial_index);
    const Constellation c = Constellation::make(cfg.modulation);
    TrialResult out;
    out.bits = f.bits.size();
    const auto started = std::chrono::steady_clock::now();
    try {
        const DetectResult r = detect_frame(cfg, detector, f, derive_seed(trial_seed(cfg.seed, snr_db, trial_index), 0x3a));
        out.detect_micros = detail::elapsed_micros(started);
        out.iterations = static_cast<int>(r.trace.size());
        out.converged = r.trace.converged;
        const auto decided = demap_hard(r.decisions, c);
        for (std::size_t i = 0; i < decided.size(); ++i) out.bit_errors += decided[i] != f.bits[i];
    } catch (const std::exception& e) {
        out.detect_micros = detail::elapsed_micros(started);
        out.error = e.what();
        out.bit_errors = out.bits;
        out.converged = false;
    }
    return out;
}

inline TrialResult run_trial(const SimConfig& cfg, SchemeKind scheme, DetectorKind detector, double snr_db,
                             std::uint64_t trial_index) {
    return run_trial(cfg, Scheme(cfg.scheme_params(scheme)), detector, snr_db, trial_index);
}

}  // namespace wfl
