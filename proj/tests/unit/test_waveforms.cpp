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

#include "test_support.hpp"

#include "catch_amalgamated.hpp"

#include <algorithm>

using namespace wfl;
using wfl::test::max_diff;

namespace {

Scheme make_scheme(SchemeKind kind, std::size_t n, std::uint64_t perm_seed = 1) {
    SchemeParams p;
    p.kind = kind;
    p.n = n;
    p.perm_seed = perm_seed;
    if (kind == SchemeKind::otfs) {
        p.otfs_l = n >= 16 ? 4 : 2;
        p.otfs_k = n / p.otfs_l;
    }
    if (kind == SchemeKind::afdm) {
        p.c1 = 3.0 / (2.0 * static_cast<double>(n));
        p.c2 = 1.0 / (2.0 * static_cast<double>(n * n));
    }
    return Scheme(p);
}

constexpr SchemeKind all_kinds[] = {SchemeKind::ofdm, SchemeKind::otfs, SchemeKind::afdm, SchemeKind::ifdm};

TimeChannel random_channel(Rng& rng, std::size_t n, double velocity, PrefixRule rule = {}) {
    PathModel m;
    m.velocity_kmh = velocity;
    m.tau_max_samples = std::min(5.0, static_cast<double>(n) / 4.0);
    m.sample_interval = 16.0 / (static_cast<double>(n) * 15e3);
    const auto ps = generate_paths(m, n, rng);
    return build_time_channel(ps, {0.4, 4, m.sample_interval}, n, rule);
}

double row_energy_spread(const cmat& m) {
    const rvec e = m.rowwise().squaredNorm();
    return e.minCoeff() / e.maxCoeff();
}

}  // namespace

TEST_CASE("every scheme is unitary", "[waveforms][unitary]") {
    Rng rng(1);
    for (auto kind : all_kinds) {
        INFO("scheme " << to_string(kind));
        for (std::size_t n : {8, 16, 32, 64}) {
            const Scheme s = make_scheme(kind, n);
            for (int rep = 0; rep < 5; ++rep) {
                const cvec v = test::random_vector(rng, n);
                const cvec x = s.modulate(v);
                CHECK(std::abs(x.norm() - v.norm()) < 1e-12 * v.norm());
                CHECK(max_diff(s.demodulate(x), v) < 1e-10);
                CHECK(max_diff(s.modulate(s.demodulate(v)), v) < 1e-10);
            }
            if (n <= 32) {
                const cmat u = materialize(DenseOperator(cmat::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))));
                cmat m(u.rows(), u.cols());
                for (Eigen::Index k = 0; k < u.cols(); ++k) m.col(k) = s.modulate(u.col(k));
                CHECK((m * m.adjoint() - cmat::Identity(m.rows(), m.cols())).norm() < 1e-9);
            }
        }
    }
}

TEST_CASE("modulate matches dense matrix forms", "[waveforms][oracle]") {
    Rng rng(2);
    SECTION("AFDM N = 4, c1 = 1/8, c2 = 1/16") {
        SchemeParams p;
        p.kind = SchemeKind::afdm;
        p.n = 4;
        p.c1 = 1.0 / 8.0;
        p.c2 = 1.0 / 16.0;
        const Scheme s(p);
        const cmat a_inv = test::chirp_oracle(4, p.c1).adjoint() * test::dft_oracle(4, true) * test::chirp_oracle(4, p.c2).adjoint();
        const cvec v = test::random_vector(rng, 4);
        CHECK(max_diff(s.modulate(v), a_inv * v) < 1e-14);
        CHECK(max_diff(s.demodulate(v), a_inv.adjoint() * v) < 1e-14);
    }
    SECTION("IFDM N = 8 demodulation is F P^{-1}") {
        const Scheme s = make_scheme(SchemeKind::ifdm, 8, 3);
        const cmat p = test::permutation_oracle(s.permutation().forward());
        const cvec y = test::random_vector(rng, 8);
        CHECK(max_diff(s.demodulate(y), test::dft_oracle(8) * p.transpose() * y) < 1e-14);
        CHECK(max_diff(s.modulate(y), p * test::dft_oracle(8, true) * y) < 1e-14);
    }
    SECTION("OTFS K = 4, L = 4 equals (F_L^H kron I_K) vec(S)") {
        const Scheme s = make_scheme(SchemeKind::otfs, 16);
        REQUIRE(s.params().otfs_k == 4);
        const cmat fl = test::dft_oracle(4, true);
        cmat kron = cmat::Zero(16, 16);
        for (Eigen::Index i = 0; i < 4; ++i) {
            for (Eigen::Index j = 0; j < 4; ++j) {
                for (Eigen::Index k = 0; k < 4; ++k) kron(i * 4 + k, j * 4 + k) = fl(i, j);
            }
        }
        const cvec v = test::random_vector(rng, 16);
        CHECK(max_diff(s.modulate(v), kron * v) < 1e-14);
    }
    SECTION("OFDM is the plain IFFT") {
        const Scheme s = make_scheme(SchemeKind::ofdm, 12);
        const cvec v = test::random_vector(rng, 12);
        CHECK(max_diff(s.modulate(v), test::dft_oracle(12, true) * v) < 1e-13);
    }
}

TEST_CASE("scheme construction", "[waveforms]") {
    SECTION("OTFS K = 32, L = 16 gives a 512-sample block") {
        SchemeParams p;
        p.kind = SchemeKind::otfs;
        p.n = 512;
        p.otfs_k = 32;
        p.otfs_l = 16;
        const Scheme s(p);
        CHECK(s.modulate(cvec::Ones(512)).size() == 512);
        p.otfs_k = 30;
        CHECK_THROWS_AS(Scheme(p), std::invalid_argument);
    }
    SECTION("IFDM with the identity permutation is OFDM") {
        Rng rng(3);
        SchemeParams p;
        p.kind = SchemeKind::ifdm;
        p.n = 32;
        const Scheme ifdm(p, PermutationMap::identity(32));
        const Scheme ofdm = make_scheme(SchemeKind::ofdm, 32);
        const cvec v = test::random_vector(rng, 32);
        CHECK(ifdm.modulate(v) == ofdm.modulate(v));
        CHECK(ifdm.demodulate(v) == ofdm.demodulate(v));
    }
    SECTION("length mismatch") {
        for (auto kind : all_kinds) {
            const Scheme s = make_scheme(kind, 16);
            CHECK_THROWS_AS(s.modulate(cvec::Zero(8)), std::invalid_argument);
            CHECK_THROWS_AS(s.demodulate(cvec::Zero(8)), std::invalid_argument);
        }
    }
    SECTION("AFDM default chirps") {
        // alpha = 1111 Hz * 64 * Ts with Ts = 16 / (64 * 15 kHz) -> ceil = 2
        const auto [c1, c2] = afdm_default_chirps(64, 1111.0, 16.0 / (64.0 * 15e3));
        CHECK(c1 == 5.0 / 128.0);
        CHECK(c2 == 1.0 / (2.0 * 64.0 * 64.0));
    }
}

TEST_CASE("OFDM over a static channel sees the DFT of the impulse response", "[waveforms][ofdm]") {
    Rng rng(4);
    const auto h = random_channel(rng, 64, 0.0);
    const Scheme s = make_scheme(SchemeKind::ofdm, 64);
    cvec first = cvec::Zero(64);
    for (std::size_t p = 0; p < h.tap_count(); ++p) first[static_cast<Eigen::Index>(p)] = h.taps()(0, static_cast<Eigen::Index>(p));
    const cvec lambda = std::sqrt(64.0) * (test::dft_oracle(64) * first);
    const cvec v = test::random_vector(rng, 64);
    CHECK(max_diff(s.demodulate(h.apply(s.modulate(v))), lambda.cwiseProduct(v)) < 1e-12);

    const auto heff = effective_channel(s, h);
    CHECK(heff.form() == EffectiveForm::diagonal);
    CHECK(max_diff(heff.diagonal(), lambda) < 1e-12);
}

TEST_CASE("effective channel", "[waveforms][effective]") {
    Rng rng(5);
    SECTION("identity channel gives the identity for every scheme") {
        for (auto kind : all_kinds) {
            const auto heff = effective_channel(make_scheme(kind, 16), TimeChannel::static_taps(16, {1.0}));
            CHECK(max_diff(heff.to_dense(), cmat::Identity(16, 16)) < 1e-12);
        }
    }
    SECTION("OFDM is diagonal when static and dense when mobile") {
        const Scheme s = make_scheme(SchemeKind::ofdm, 32);
        const auto fixed = effective_channel(s, random_channel(rng, 32, 0.0));
        CHECK(fixed.form() == EffectiveForm::diagonal);
        const auto mobile = effective_channel(s, random_channel(rng, 32, 300.0));
        CHECK(mobile.form() == EffectiveForm::composition);
        cmat d = mobile.to_dense();
        const double total = d.norm();
        d.diagonal().setZero();
        CHECK(d.norm() / total > 0.05);
    }
    SECTION("the composition equals U^-1 H U materialized") {
        for (auto kind : all_kinds) {
            const Scheme s = make_scheme(kind, 32);
            const auto h = random_channel(rng, 32, 500.0, s.prefix_rule());
            const auto heff = effective_channel(s, h);
            cmat u(32, 32);
            for (Eigen::Index k = 0; k < 32; ++k) u.col(k) = s.modulate(cmat::Identity(32, 32).col(k));
            const cmat dense = u.adjoint() * h.to_dense() * u;
            const cvec v = test::random_vector(rng, 32);
            CHECK(max_diff(heff.apply(v), dense * v) < 1e-10);
            CHECK(max_diff(heff.apply_adjoint(v), dense.adjoint() * v) < 1e-10);
        }
    }
    SECTION("IFDM spreads the static channel evenly over rows") {
        // thresholds measured before the build over 100 draws (seed 2024):
        // medians 0.41 for IFDM and 0.011 for OFDM
        Rng draws(2024);
        std::vector<double> ifdm, ofdm;
        for (int d = 0; d < 100; ++d) {
            const auto h = random_channel(draws, 32, 0.0);
            ifdm.push_back(row_energy_spread(effective_channel(make_scheme(SchemeKind::ifdm, 32), h).to_dense()));
            ofdm.push_back(row_energy_spread(effective_channel(make_scheme(SchemeKind::ofdm, 32), h).to_dense()));
        }
        std::sort(ifdm.begin(), ifdm.end());
        std::sort(ofdm.begin(), ofdm.end());
        const double med_ifdm = 0.5 * (ifdm[49] + ifdm[50]);
        const double med_ofdm = 0.5 * (ofdm[49] + ofdm[50]);
        INFO("median spread IFDM " << med_ifdm << ", OFDM " << med_ofdm);
        CHECK(med_ifdm >= 0.3);
        CHECK(med_ofdm <= 0.1);
        CHECK(med_ifdm >= 10.0 * med_ofdm);
    }
    SECTION("scheme and channel sizes must agree") {
        CHECK_THROWS_AS(effective_channel(make_scheme(SchemeKind::ofdm, 16), TimeChannel::static_taps(32, {1.0})),
                        std::invalid_argument);
    }
}

TEST_CASE("prefix insertion and removal", "[waveforms][prefix]") {
    Rng rng(6);
    for (auto kind : all_kinds) {
        INFO("scheme " << to_string(kind));
        const Scheme s = make_scheme(kind, 16);
        const cvec x = test::random_vector(rng, 16);
        const cvec ext = add_prefix(s, x, 4);
        REQUIRE(ext.size() == 20);
        CHECK(remove_prefix(s, ext, 4) == x);
        if (kind != SchemeKind::afdm) {
            CHECK(ext.head(4) == x.tail(4));
        } else {
            // x[n] for n < 0 stands for x[N + n] e^{-j 2 pi c1 (N^2 + 2 N n)}
            const double c1 = s.params().c1;
            for (long m = 1; m <= 4; ++m) {
                const double turns = c1 * (256.0 - 32.0 * static_cast<double>(m));
                CHECK(std::abs(ext[4 - m] - x[16 - m] * std::polar(1.0, -2.0 * pi * turns)) < 1e-13);
            }
        }
    }
    SECTION("prefix shorter than the channel memory") {
        CHECK_THROWS_AS(add_prefix(make_scheme(SchemeKind::ofdm, 16), cvec::Zero(16), 2, 4), std::invalid_argument);
    }
}

TEST_CASE("prefixed linear convolution equals the wrapped channel", "[waveforms][prefix]") {
    Rng rng(7);
    for (auto kind : all_kinds) {
        INFO("scheme " << to_string(kind));
        const Scheme s = make_scheme(kind, 16);
        const auto h = random_channel(rng, 16, 500.0, s.prefix_rule());
        const std::size_t cp = h.tap_count() - 1;
        const cvec x = test::random_vector(rng, 16);
        const cvec ext = add_prefix(s, x, cp);
        // r[k] = sum_p g[k - cp, p] x_ext[k - p] over the retained samples
        cvec kept = cvec::Zero(16);
        for (Eigen::Index n = 0; n < 16; ++n) {
            for (Eigen::Index p = 0; p < static_cast<Eigen::Index>(h.tap_count()); ++p) {
                kept[n] += h.taps()(n, p) * ext[n + static_cast<Eigen::Index>(cp) - p];
            }
        }
        CHECK(max_diff(kept, h.apply(x)) < 1e-12);
        CHECK(max_diff(remove_prefix(s, h.propagate(ext, cp), cp), h.apply(x)) < 1e-12);
    }
}
