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

#include "waveformlab/harness/trial.hpp"
#include "waveformlab/numerics/stats.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>

namespace wfl {

/// Error statistics of the linear-step output at one iteration, pooled over
/// frames.
struct IterationErrorStats {
    int t = 0;
    double max_corr = 0.0;    // max_k |<x_k - x, r_t - x>| / (||x_k - x|| ||r_t - x||)
    double ks_pre = 0.0;      // (r_t - x) against CN(0, v_gamma)
    double ks_post = 0.0;     // (U^{-1} r_t - s) against CN(0, v_gamma)
    double var_ratio = 0.0;   // empirical / tracked error variance
    std::size_t samples = 0;  // real-valued samples per KS test
};

struct GaussianityReport {
    double ks_pre = 0.0;  // first iteration
    double ks_post = 0.0;
    std::vector<IterationErrorStats> iterations;
    std::vector<double> pre_samples;   // first-iteration normalized parts, for Q-Q data
    std::vector<double> post_samples;
};

namespace detail {

struct PooledIteration {
    std::vector<cplx> cross;
    std::vector<double> input_energy;
    double error_energy = 0.0;
    double tracked = 0.0;
    double entries = 0.0;
    std::vector<double> pre;
    std::vector<double> post;
};

}  // namespace detail

/// First `iterations` linear-step outputs of CD-MAMP on the first configured
/// scheme, pooled over `trials` frames at `snr_db`.
inline GaussianityReport gaussianity_probe(const SimConfig& cfg, double snr_db, std::size_t trials, int iterations = 1) {
    validate(cfg);
    const Scheme scheme(cfg.scheme_params(cfg.schemes.front()));
    std::vector<detail::PooledIteration> pool(static_cast<std::size_t>(std::max(iterations, 1)));
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const Frame f = draw_frame(cfg, scheme, snr_db, trial);
        const cvec x = SegmentedScheme(f.scheme, cfg.nt).modulate(f.symbols);
        DetectOptions opt;
        opt.observer = [&](const IterationView& v) {
            if (v.t < 1 || v.t > static_cast<int>(pool.size())) return;
            auto& p = pool[static_cast<std::size_t>(v.t - 1)];
            const cvec e = v.r_time - x;
            p.error_energy += e.squaredNorm();
            p.tracked += v.v_gamma * static_cast<double>(e.size());
            p.entries += static_cast<double>(e.size());
            p.cross.resize(std::max(p.cross.size(), v.inputs.size()));
            p.input_energy.resize(p.cross.size());
            for (std::size_t k = 0; k < v.inputs.size(); ++k) {
                const cvec fk = v.inputs[k] - x;
                p.cross[k] += fk.dot(e);
                p.input_energy[k] += fk.squaredNorm();
            }
            append_normalized_parts(e, v.v_gamma, p.pre);
            append_normalized_parts(cvec(v.r_signal - f.symbols), v.v_gamma, p.post);
        };
        SimConfig run = cfg;
        run.iterations.max = std::max(run.iterations.max, iterations);
        (void)detect_frame(run, DetectorKind::cd_mamp, f, derive_seed(trial_seed(cfg.seed, snr_db, trial), 0x3a), opt);
    }

    GaussianityReport rep;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        auto& p = pool[i];
        if (p.entries == 0.0) break;
        IterationErrorStats s;
        s.t = static_cast<int>(i + 1);
        for (std::size_t k = 0; k < p.cross.size(); ++k) {
            if (p.input_energy[k] > 0.0 && p.error_energy > 0.0) {
                s.max_corr = std::max(s.max_corr, std::abs(p.cross[k]) / std::sqrt(p.input_energy[k] * p.error_energy));
            }
        }
        s.var_ratio = p.error_energy / p.tracked;
        s.samples = p.pre.size();
        if (i == 0) {
            rep.pre_samples = p.pre;
            rep.post_samples = p.post;
        }
        s.ks_pre = ks_statistic(std::move(p.pre));
        s.ks_post = ks_statistic(std::move(p.post));
        rep.iterations.push_back(s);
    }
    if (!rep.iterations.empty()) {
        rep.ks_pre = rep.iterations.front().ks_pre;
        rep.ks_post = rep.iterations.front().ks_post;
    }
    return rep;
}

/// Empirical quantile with linear interpolation between order statistics.
inline double empirical_quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct QqRow {
    double theoretical;
    double pre;
    double post;
};

/// Quantiles at p = 1/(levels+1) .. levels/(levels+1).
inline std::vector<QqRow> qq_table(std::vector<double> pre, std::vector<double> post, std::size_t levels = 49) {
    std::sort(pre.begin(), pre.end());
    std::sort(post.begin(), post.end());
    std::vector<QqRow> rows;
    rows.reserve(levels);
    for (std::size_t i = 1; i <= levels; ++i) {
        const double p = static_cast<double>(i) / static_cast<double>(levels + 1);
        rows.push_back({normal_quantile(p), empirical_quantile(pre, p), empirical_quantile(post, p)});
    }
    return rows;
}

/// Tab-separated: header "theoretical\tpre\tpost", six decimals.
inline void write_qq_tsv(std::ostream& os, const std::vector<QqRow>& rows) {
    os << "theoretical\tpre\tpost\n";
    char buf[96];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f\t%.6f\t%.6f\n", r.theoretical, r.pre, r.post);
        os << buf;
    }
}

struct RuntimeRow {
    DetectorKind detector;
    std::size_t n;
    double micros;  // median over groups of the per-group mean
};

struct RuntimeOptions {
    std::vector<std::size_t> n_grid{64, 128, 256, 512};
    std::vector<DetectorKind> detectors{DetectorKind::lmmse, DetectorKind::cd_oamp, DetectorKind::cd_mamp};
    double snr_db = 10.0;
    std::size_t groups = 3;
    std::size_t calls_per_group = 3;
    int iterations = 10;  // fixed iteration budget, no early stop on tolerance
};

/// Mean detect time per call as N grows, first configured scheme: median over
/// groups of the per-group mean. Each detector is timed on its own, after one
/// untimed call per N.
inline std::vector<RuntimeRow> runtime_profile(const SimConfig& base, const RuntimeOptions& opt = {}) {
    struct Setup {
        SimConfig cfg;
        std::vector<Frame> frames;
    };
    std::vector<Setup> setups;
    for (std::size_t n : opt.n_grid) {
        SimConfig cfg = base;
        cfg.n = n;
        cfg.iterations.max = opt.iterations;
        cfg.iterations.tol = 0.0;
        validate(cfg);
        const Scheme scheme(cfg.scheme_params(cfg.schemes.front()));
        std::vector<Frame> frames;
        for (std::size_t i = 0; i < opt.calls_per_group; ++i) frames.push_back(draw_frame(cfg, scheme, opt.snr_db, i));
        setups.push_back({std::move(cfg), std::move(frames)});
    }
    std::vector<RuntimeRow> rows;
    for (auto det : opt.detectors) {
        for (const auto& [cfg, frames] : setups) {
            if (!frames.empty()) (void)detect_frame(cfg, det, frames.front(), 0x3a);
        }
        // groups cycle through the N grid
        std::vector<std::vector<double>> means(setups.size());
        for (std::size_t g = 0; g < opt.groups; ++g) {
            for (std::size_t k = 0; k < setups.size(); ++k) {
                const auto& [cfg, frames] = setups[k];
                if (frames.empty()) continue;
                const auto started = std::chrono::steady_clock::now();
                for (std::size_t i = 0; i < frames.size(); ++i) (void)detect_frame(cfg, det, frames[i], 0x3a + i);
                means[k].push_back(detail::elapsed_micros(started) / static_cast<double>(frames.size()));
            }
        }
        for (std::size_t k = 0; k < setups.size(); ++k) {
            if (means[k].empty()) continue;
            std::sort(means[k].begin(), means[k].end());
            rows.push_back({det, setups[k].cfg.n, means[k][means[k].size() / 2]});
        }
    }
    return rows;
}

}  // namespace wfl
