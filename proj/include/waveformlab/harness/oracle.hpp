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

#include "json.hpp"

#include <functional>
#include <string>
#include <string_view>

namespace wfl {

struct OracleCheck {
    std::string name;
    bool passed = false;
    double value = 0.0;      // measured discrepancy
    double tolerance = 0.0;  // passes when value <= tolerance
    std::string detail;
};

struct OracleReport {
    std::string suite;
    std::vector<OracleCheck> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.passed; });
    }

    void add(std::string name, double value, double tolerance, std::string detail = {}) {
        const bool ok = std::isfinite(value) && value <= tolerance;
        checks.push_back({std::move(name), ok, value, tolerance, std::move(detail)});
    }
};

/// {"suite", "passed", "checks": [{"name", "passed", "value", "tolerance", "detail"}]}
inline nlohmann::json to_json(const OracleReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"value", std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr)},
                          {"tolerance", c.tolerance},
                          {"detail", c.detail}});
    }
    return {{"suite", r.suite}, {"passed", r.passed()}, {"checks", std::move(checks)}};
}

/// Transforms under test. Empty members fall back to Scheme::modulate and
/// Scheme::demodulate; tests substitute broken ones to see the suite fail.
struct OracleHooks {
    std::function<cvec(const Scheme&, const cvec&)> modulate;
    std::function<cvec(const Scheme&, const cvec&)> demodulate;
};

/// Block errors of a detector against the exhaustive MAP decision on the same
/// frames.
struct MapComparison {
    std::size_t trials = 0;
    std::size_t detector_errors = 0;
    std::size_t map_errors = 0;
    std::size_t detector_only = 0;  // detector wrong, MAP right
    std::size_t map_only = 0;       // MAP wrong, detector right

    double detector_rate() const { return trials ? static_cast<double>(detector_errors) / static_cast<double>(trials) : 0.0; }
    double map_rate() const { return trials ? static_cast<double>(map_errors) / static_cast<double>(trials) : 0.0; }
    /// Standard deviation of the paired rate difference.
    double gap_sigma() const {
        return trials ? std::sqrt(static_cast<double>(detector_only + map_only)) / static_cast<double>(trials) : 0.0;
    }
};

/// Needs BPSK and at most 16 transmitted symbols per frame.
inline MapComparison exhaustive_map_comparison(const SimConfig& cfg, DetectorKind detector, double snr_db,
                                               std::size_t trials) {
    validate(cfg);
    const std::size_t symbols = cfg.nt * cfg.n;
    detail::require(cfg.modulation == Modulation::bpsk && symbols <= 16,
                    "exhaustive_map_comparison: needs BPSK and at most 16 symbols");
    const Scheme scheme(cfg.scheme_params(cfg.schemes.front()));
    const auto ns = static_cast<Eigen::Index>(symbols);
    MapComparison out;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const Frame f = draw_frame(cfg, scheme, snr_db, trial);
        const SegmentedScheme u(f.scheme, cfg.nt);
        cmat a(static_cast<Eigen::Index>(f.channel.rows()), ns);
        for (Eigen::Index k = 0; k < ns; ++k) a.col(k) = f.channel.apply(u.modulate(cvec::Unit(ns, k)));

        double best = std::numeric_limits<double>::infinity();
        cvec best_s;
        cvec s(ns);
        for (std::uint32_t mask = 0; mask < (1U << symbols); ++mask) {
            for (Eigen::Index k = 0; k < ns; ++k) s[k] = (mask >> k) & 1U ? -1.0 : 1.0;
            const double d = (f.y - a * s).squaredNorm();
            if (d < best) {
                best = d;
                best_s = s;
            }
        }
        const DetectResult r = detect_frame(cfg, detector, f, derive_seed(trial_seed(cfg.seed, snr_db, trial), 0x3a));
        const bool det_wrong = (r.decisions - f.symbols).cwiseAbs().maxCoeff() > 1e-9;
        const bool map_wrong = (best_s - f.symbols).cwiseAbs().maxCoeff() > 1e-9;
        out.trials += 1;
        out.detector_errors += det_wrong;
        out.map_errors += map_wrong;
        out.detector_only += det_wrong && !map_wrong;
        out.map_only += map_wrong && !det_wrong;
    }
    return out;
}

namespace oracle_detail {

inline cmat idft(std::size_t n) {
    const auto nn = static_cast<Eigen::Index>(n);
    cmat f(nn, nn);
    for (Eigen::Index r = 0; r < nn; ++r) {
        for (Eigen::Index k = 0; k < nn; ++k) {
            const double turns = static_cast<double>((r * k) % nn) / static_cast<double>(n);
            f(r, k) = std::polar(1.0 / std::sqrt(static_cast<double>(n)), 2.0 * pi * turns);
        }
    }
    return f;
}

inline cvec chirp_conj(std::size_t n, double c) {
    cvec d(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        d[static_cast<Eigen::Index>(k)] = std::polar(1.0, 2.0 * pi * c * static_cast<double>(k * k));
    }
    return d;
}

/// Modulation matrix assembled from the textbook definitions.
inline cmat modulation_matrix(const Scheme& s) {
    const auto& p = s.params();
    const auto n = static_cast<Eigen::Index>(p.n);
    switch (p.kind) {
        case SchemeKind::ofdm: return idft(p.n);
        case SchemeKind::ifdm: {
            cmat perm = cmat::Zero(n, n);
            for (std::size_t i = 0; i < p.n; ++i) perm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s.permutation().forward()[i])) = 1.0;
            return perm * idft(p.n);
        }
        case SchemeKind::afdm:
            return chirp_conj(p.n, p.c1).asDiagonal() * idft(p.n) * chirp_conj(p.n, p.c2).asDiagonal();
        case SchemeKind::otfs: {
            const cmat fl = idft(p.otfs_l);
            const auto k = static_cast<Eigen::Index>(p.otfs_k);
            cmat m = cmat::Zero(n, n);
            for (Eigen::Index i = 0; i < fl.rows(); ++i) {
                for (Eigen::Index j = 0; j < fl.cols(); ++j) m.block(i * k, j * k, k, k) = fl(i, j) * cmat::Identity(k, k);
            }
            return m;
        }
    }
    return {};
}

inline long double raised_cosine_ld(long double x, long double beta, int span) {
    if (std::abs(x) > static_cast<long double>(span) + 1e-12L) return 0.0L;
    const long double pil = 3.141592653589793238462643383279502884L;
    const auto sinc = [&](long double u) { return u == 0.0L ? 1.0L : std::sin(pil * u) / (pil * u); };
    const long double d = 2.0L * beta * x;
    if (std::abs(std::abs(d) - 1.0L) < 1e-12L) return (pil / 4.0L) * sinc(1.0L / (2.0L * beta));
    return sinc(x) * std::cos(pil * beta * x) / (1.0L - d * d);
}

/// Dense H with H[n, (n - p) mod N] = g[n, p] times the guard phase, g from
/// the path sum evaluated in extended precision.
inline cmat dense_channel(const PathSet& paths, const PulseShape& shape, std::size_t n, std::size_t taps, double c1) {
    const auto nn = static_cast<Eigen::Index>(n);
    cmat h = cmat::Zero(nn, nn);
    const long double pil = 3.141592653589793238462643383279502884L;
    for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t p = 0; p < taps; ++p) {
            std::complex<long double> g{0.0L, 0.0L};
            for (const auto& path : paths.paths) {
                const long double x = static_cast<long double>(p) - static_cast<long double>(path.delay) / shape.sample_interval;
                const long double amp = raised_cosine_ld(x, shape.rolloff, shape.span);
                const long double ph = 2.0L * pil * path.doppler * (static_cast<long double>(row) - static_cast<long double>(p)) *
                                       static_cast<long double>(paths.sample_interval);
                g += std::complex<long double>(path.gain.real(), path.gain.imag()) * std::polar(amp, ph);
            }
            cplx v{static_cast<double>(g.real()), static_cast<double>(g.imag())};
            long col = static_cast<long>(row) - static_cast<long>(p);
            if (col < 0) {
                const long double nl = static_cast<long double>(n);
                const long double turns = std::fmod(static_cast<long double>(c1) * (nl * nl + 2.0L * nl * col), 1.0L);
                v *= std::polar(1.0, static_cast<double>(-2.0L * pil * turns));
                col += static_cast<long>(n);
            }
            h(static_cast<Eigen::Index>(row), col) += v;
        }
    }
    return h;
}

inline double max_abs(const cmat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs(const cvec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

inline std::vector<Scheme> small_schemes(std::size_t n = 16) {
    std::vector<Scheme> out;
    SchemeParams p;
    p.n = n;
    p.kind = SchemeKind::ofdm;
    out.emplace_back(p);
    p.kind = SchemeKind::otfs;
    p.otfs_l = 4;
    p.otfs_k = n / 4;
    out.emplace_back(p);
    p.kind = SchemeKind::afdm;
    p.c1 = 3.0 / (2.0 * static_cast<double>(n));
    p.c2 = 1.0 / (2.0 * static_cast<double>(n * n));
    out.emplace_back(p);
    p.kind = SchemeKind::ifdm;
    p.perm_seed = 7;
    out.emplace_back(p);
    return out;
}

inline PathSet oracle_paths(std::size_t n, bool fractional, std::uint64_t seed) {
    PathModel m;
    m.num_paths = 4;
    m.tau_max_samples = 3.0;
    m.velocity_kmh = 300.0;
    m.carrier_hz = 4e9;
    m.sample_interval = 16.0 / (static_cast<double>(n) * 15e3);
    m.fractional_delays = fractional;
    Rng rng(seed);
    return generate_paths(m, n, rng);
}

inline void small_suite(OracleReport& rep, const OracleHooks& hooks) {
    const auto mod = [&](const Scheme& s, const cvec& v) { return hooks.modulate ? hooks.modulate(s, v) : s.modulate(v); };
    const auto demod = [&](const Scheme& s, const cvec& v) { return hooks.demodulate ? hooks.demodulate(s, v) : s.demodulate(v); };
    Rng rng(0x0a11ceULL);
    for (const Scheme& s : small_schemes()) {
        const std::string tag(to_string(s.kind()));
        const cmat u = modulation_matrix(s);
        const auto n = static_cast<Eigen::Index>(s.size());
        cmat applied(n, n);
        cmat inverse(n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            applied.col(k) = mod(s, cvec::Unit(n, k));
            inverse.col(k) = demod(s, cvec::Unit(n, k));
        }
        rep.add(tag + ".modulate_matches_dense", max_abs(cmat(applied - u)), 1e-10);
        rep.add(tag + ".demodulate_matches_dense", max_abs(cmat(inverse - u.adjoint())), 1e-10);
        rep.add(tag + ".unitary", max_abs(cmat(u.adjoint() * applied - cmat::Identity(n, n))), 1e-10);
        const cvec v = rng.complex_normal_vector(s.size(), 1.0);
        rep.add(tag + ".round_trip", max_abs(cvec(demod(s, mod(s, v)) - v)), 1e-10);
        rep.add(tag + ".norm_preserved", std::abs(mod(s, v).norm() - v.norm()) / v.norm(), 1e-10);

        const PathSet paths = oracle_paths(s.size(), false, 0x5eedULL + static_cast<std::uint64_t>(s.kind()));
        const PulseShape shape{0.4, 4, paths.sample_interval};
        const TimeChannel tc = build_time_channel(paths, shape, s.size(), s.prefix_rule());
        const cmat h = dense_channel(paths, shape, s.size(), tc.tap_count(), s.prefix_rule().c1);
        const EffectiveChannel heff(s, MimoChannel(tc));
        rep.add(tag + ".effective_channel", max_abs(cmat(heff.to_dense() - u.adjoint() * h * u)), 1e-10);
    }
}

inline void mamp_suite(OracleReport& rep) {
    // trace moments: sparse/probe path against dense matrix powers
    {
        SimConfig cfg;
        cfg.schemes = {SchemeKind::ifdm};
        cfg.n = 128;
        const Frame f = draw_frame(cfg, Scheme(cfg.scheme_params(SchemeKind::ifdm)), 10.0, 0);
        const cmat h = materialize(f.channel);
        const cmat c = h * h.adjoint();
        const double lambda = 0.5 * Eigen::SelfAdjointEigenSolver<cmat>(c, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
        MomentOptions opt;
        opt.exact_dim = 0;
        const std::size_t count = 12;
        const auto w = trace_moments(f.channel, lambda, count, opt);
        const cmat b = lambda * cmat::Identity(c.rows(), c.cols()) - c;
        cmat m = c;
        double worst = 0.0;
        for (std::size_t k = 0; k < count; ++k) {
            const double ref = m.trace().real() / static_cast<double>(h.cols());
            worst = std::max(worst, std::abs(w[k] - ref) / std::max(std::abs(ref), 1e-300));
            m = m * b;
        }
        rep.add("moments.exact_orders", worst, 1e-9, "w_0..w_11 at N=128, relative");

        const SpectralBounds sb = spectral_bounds(f.channel, 500, 1e-12);
        rep.add("spectral.lambda_max", std::abs(sb.lambda_max - 2.0 * lambda) / (2.0 * lambda), 1e-4);
    }

    // damping: closed form against a grid search over affine weights
    {
        rmat a(3, 3);
        a << 1.0, 0.2, -0.3, 0.4, 0.9, 0.1, 0.0, -0.2, 0.7;
        const rmat v = a * a.transpose() + 0.05 * rmat::Identity(3, 3);
        const DampingResult d = damping_weights(v);
        double grid_min = std::numeric_limits<double>::infinity();
        for (int i = -300; i <= 300; ++i) {
            for (int j = -300; j <= 300; ++j) {
                rvec z(3);
                z << i * 0.01, j * 0.01, 1.0 - (i + j) * 0.01;
                grid_min = std::min(grid_min, z.dot(v * z));
            }
        }
        rep.add("damping.not_above_grid_minimum", d.variance - grid_min, 1e-12);
        rep.add("damping.grid_gap", grid_min - d.variance, 1e-3);
        rep.add("damping.weights_sum_to_one", std::abs(d.zeta.sum() - 1.0), 1e-12);
    }

    // BPSK denoiser: closed-form tanh and the integrated MMSE
    {
        const Constellation bpsk = Constellation::make(Modulation::bpsk);
        const double v = 0.5;
        cvec r(81);
        for (Eigen::Index i = 0; i < r.size(); ++i) r[i] = cplx{-4.0 + 0.1 * static_cast<double>(i), 0.3};
        double worst = 0.0;
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            const DenoiseResult one = mmse_denoise(r.segment(i, 1), v, bpsk);
            const double m = std::tanh(2.0 * r[i].real() / v);
            worst = std::max({worst, std::abs(one.mean[0] - m), std::abs(one.variance - (1.0 - m * m))});
        }
        rep.add("denoiser.bpsk_closed_form", worst, 1e-12);

        // E over s = +1 and Re(noise) ~ N(0, v/2) by trapezoid quadrature
        const double sd = std::sqrt(v / 2.0);
        const int steps = 4000;
        const double lo = -10.0 * sd;
        const double hx = 20.0 * sd / steps;
        double mmse_ref = 0.0;
        cvec grid(steps + 1);
        rvec weight(steps + 1);
        for (int i = 0; i <= steps; ++i) {
            const double e = lo + i * hx;
            const double wq = (i == 0 || i == steps ? 0.5 : 1.0) * hx * std::exp(-e * e / (2.0 * sd * sd)) / (sd * std::sqrt(2.0 * pi));
            const double m = std::tanh(2.0 * (1.0 + e) / v);
            mmse_ref += wq * (1.0 - m * m);
            grid[i] = cplx{1.0 + e, 0.0};
            weight[i] = wq;
        }
        double mmse = 0.0;
        for (Eigen::Index i = 0; i < grid.size(); ++i) mmse += weight[i] * mmse_denoise(grid.segment(i, 1), v, bpsk).variance;
        rep.add("denoiser.bpsk_mmse_quadrature", std::abs(mmse - mmse_ref), 1e-9);
    }

    // LMMSE against the explicit inverse of the other Gram form
    {
        Rng rng(0x1337ULL);
        cmat h(12, 12);
        for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = rng.complex_normal(1.0 / 12.0);
        const cvec y = rng.complex_normal_vector(12, 1.0);
        const double s2 = 0.1;
        const cmat gram = h.adjoint() * h + s2 * cmat::Identity(12, 12);
        const cvec ref = gram.inverse() * (h.adjoint() * y);
        rep.add("lmmse.dense_inverse", max_abs(cvec(lmmse_solve(h, y, s2) - ref)), 1e-10);
    }

    // exhaustive MAP at N = 4
    {
        SimConfig cfg;
        cfg.schemes = {SchemeKind::ifdm};
        cfg.n = 4;
        cfg.modulation = Modulation::bpsk;
        cfg.channel.paths = 3;
        cfg.channel.tau_max_samples = 2.0;
        const MapComparison mc = exhaustive_map_comparison(cfg, DetectorKind::cd_mamp, 10.0, 1000);
        const double gap = mc.detector_rate() - mc.map_rate();
        char buf[128];
        std::snprintf(buf, sizeof buf, "detector %.4f map %.4f over %zu frames", mc.detector_rate(), mc.map_rate(), mc.trials);
        rep.add("map.block_error_within_2pct", gap, 0.02 + 3.0 * mc.gap_sigma(), buf);
        rep.add("map.not_below_map", -gap, 3.0 * mc.gap_sigma() + 1e-12, buf);
    }
}

inline void channel_suite(OracleReport& rep) {
    Rng rng(0xc4a77e1ULL);
    const std::size_t n = 32;
    for (bool fractional : {false, true}) {
        const std::string tag = fractional ? "channel.fractional" : "channel.integer";
        const PathSet paths = oracle_paths(n, fractional, fractional ? 11 : 12);
        const PulseShape shape{0.4, 4, paths.sample_interval};
        const TimeChannel tc = build_time_channel(paths, shape, n);
        const cmat h = dense_channel(paths, shape, n, tc.tap_count(), 0.0);
        rep.add(tag + ".scalar_taps", max_abs(cmat(tc.to_dense() - h)), 1e-12);
        const cvec x = rng.complex_normal_vector(n, 1.0);
        rep.add(tag + ".apply_matches_dense", max_abs(cvec(tc.apply(x) - h * x)), 1e-12);
        rep.add(tag + ".adjoint_matches_dense", max_abs(cvec(tc.apply_adjoint(x) - h.adjoint() * x)), 1e-12);
        rep.add(tag + ".sparse_matches_dense", max_abs(cmat(cmat(tc.to_sparse()) - h)), 1e-12);
    }

    for (const Scheme& s : small_schemes(n)) {
        if (s.kind() != SchemeKind::ofdm && s.kind() != SchemeKind::afdm) continue;
        const std::string tag = s.kind() == SchemeKind::afdm ? "channel.chirp_prefix" : "channel.cyclic_prefix";
        const PathSet paths = oracle_paths(n, false, 21);
        const PulseShape shape{0.4, 4, paths.sample_interval};
        const TimeChannel tc = build_time_channel(paths, shape, n, s.prefix_rule());
        const cmat h = dense_channel(paths, shape, n, tc.tap_count(), s.prefix_rule().c1);
        const cvec x = rng.complex_normal_vector(n, 1.0);
        const std::size_t cp = tc.tap_count() - 1;
        const cvec r = remove_prefix(s, tc.propagate(add_prefix(s, x, cp), cp), cp);
        rep.add(tag + ".linear_equals_block", max_abs(cvec(r - h * x)), 1e-12);
    }

    {
        std::vector<PathSet> grid;
        for (std::uint64_t k = 0; k < 4; ++k) grid.push_back(oracle_paths(n, false, 40 + k));
        const PulseShape shape{0.4, 4, grid.front().sample_interval};
        const MimoChannel mc = build_mimo_channel(grid, 2, 2, shape, n);
        cmat dense = cmat::Zero(2 * n, 2 * n);
        const auto nn = static_cast<Eigen::Index>(n);
        for (std::size_t m = 0; m < 2; ++m) {
            for (std::size_t j = 0; j < 2; ++j) {
                dense.block(static_cast<Eigen::Index>(m) * nn, static_cast<Eigen::Index>(j) * nn, nn, nn) =
                    dense_channel(grid[m * 2 + j], shape, n, mc.block(m, j).tap_count(), 0.0);
            }
        }
        const cvec x = rng.complex_normal_vector(2 * n, 1.0);
        rep.add("channel.mimo_apply_matches_dense", max_abs(cvec(mc.apply(x) - dense * x)), 1e-12);
        rep.add("channel.mimo_adjoint_matches_dense", max_abs(cvec(mc.apply_adjoint(x) - dense.adjoint() * x)), 1e-12);
    }

    {
        // static channel under OFDM is diagonal with the DFT of the first column
        PathSet paths = oracle_paths(n, false, 77);
        for (auto& p : paths.paths) p.doppler = 0.0;
        const PulseShape shape{0.4, 4, paths.sample_interval};
        const Scheme ofdm = small_schemes(n).front();
        const TimeChannel tc = build_time_channel(paths, shape, n);
        const cmat u = modulation_matrix(ofdm);
        const cmat d = u.adjoint() * dense_channel(paths, shape, n, tc.tap_count(), 0.0) * u;
        const EffectiveChannel heff(ofdm, MimoChannel(tc));
        const cmat off = d - cmat(d.diagonal().asDiagonal());
        rep.add("channel.static_ofdm_off_diagonal", max_abs(off), 1e-12);
        rep.add("channel.static_ofdm_diagonal",
                heff.form() == EffectiveForm::diagonal ? max_abs(cvec(heff.diagonal() - d.diagonal())) : 1.0, 1e-12);
    }
}

}  // namespace oracle_detail

inline const std::vector<std::string>& oracle_suites() {
    static const std::vector<std::string> names{"small", "mamp", "channel"};
    return names;
}

/// Runs one named suite. Throws std::invalid_argument for an unknown name.
inline OracleReport run_oracle_suite(std::string_view suite, const OracleHooks& hooks = {}) {
    OracleReport rep;
    rep.suite = std::string(suite);
    if (suite == "small") {
        oracle_detail::small_suite(rep, hooks);
    } else if (suite == "mamp") {
        oracle_detail::mamp_suite(rep);
    } else if (suite == "channel") {
        oracle_detail::channel_suite(rep);
    } else {
        throw std::invalid_argument("unknown oracle suite '" + std::string(suite) + "'");
    }
    return rep;
}

}  // namespace wfl
