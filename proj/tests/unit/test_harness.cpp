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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace wfl;

#ifndef WAVEFORMLAB_CONFIG_DIR
#define WAVEFORMLAB_CONFIG_DIR "configs"
#endif

namespace {

SimConfig small_config() {
    SimConfig cfg;
    cfg.schemes = {SchemeKind::ifdm, SchemeKind::ofdm};
    cfg.detectors = {DetectorKind::cd_mamp, DetectorKind::lmmse};
    cfg.n = 32;
    cfg.waveform.doppler_bins = 4;
    cfg.snr_db = {6.0, 10.0};
    cfg.stop = {30, 24};
    cfg.seed = 99;
    return cfg;
}

std::string config_error_key(const std::string& text) {
    try {
        config_from_text(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<none>";
}

BerCurve synthetic_curve(std::string label, double shift_db) {
    // BER = 10^{-(snr - shift)/5}: exact log-linear, so interpolation is exact
    BerCurve c{std::move(label), {}};
    for (double snr = 0.0; snr <= 20.0; snr += 2.0) c.points.push_back({snr, std::pow(10.0, -(snr - shift_db) / 5.0)});
    return c;
}

}  // namespace

TEST_CASE("configuration parsing", "[harness][config]") {
    SECTION("round trip through JSON") {
        SimConfig cfg = small_config();
        cfg.modulation = Modulation::qam16;
        cfg.channel.profile = DelayProfile::exponential;
        cfg.waveform.afdm_c1 = 0.01;
        cfg.iterations.max = 7;
        CHECK(config_from_json(config_to_json(cfg)) == cfg);
    }
    SECTION("unknown keys are rejected by full path") {
        CHECK(config_error_key(R"({"scheme": "ifdm", "bogus": 1})") == "bogus");
        CHECK(config_error_key(R"({"scheme": "ifdm", "channel": {"speed": 3}})") == "channel.speed");
    }
    SECTION("missing scheme names the key") {
        CHECK(config_error_key(R"({"N": 64})") == "scheme");
        try {
            config_from_text(R"({"N": 64})");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).rfind("scheme: ", 0) == 0);
        }
    }
    SECTION("invalid values name the key") {
        CHECK(config_error_key(R"({"scheme": "otfs", "N": 60, "waveform": {"doppler_bins": 16}})") == "waveform.doppler_bins");
        CHECK(config_error_key(R"({"scheme": "ifdm", "modulation": "8psk"})") == "modulation");
        CHECK(config_error_key(R"({"scheme": "ifdm", "N": 4, "channel": {"tau_max_samples": 5}})") == "channel.tau_max_samples");
        CHECK(config_error_key(R"({"scheme": "ifdm", "snr_db": []})") == "snr_db");
    }
    SECTION("shipped configurations parse") {
        for (const auto& entry : std::filesystem::directory_iterator(WAVEFORMLAB_CONFIG_DIR)) {
            if (entry.path().extension() != ".json") continue;
            std::ifstream in(entry.path());
            std::stringstream ss;
            ss << in.rdbuf();
            INFO(entry.path());
            CHECK_NOTHROW(config_from_text(ss.str()));
        }
    }
}

TEST_CASE("trials", "[harness][trial]") {
    const SimConfig cfg = small_config();
    SECTION("a trial replays from its index") {
        for (auto det : {DetectorKind::lmmse, DetectorKind::cd_oamp, DetectorKind::cd_mamp}) {
            const auto a = run_trial(cfg, SchemeKind::ifdm, det, 6.0, 5);
            const auto b = run_trial(cfg, SchemeKind::ifdm, det, 6.0, 5);
            CHECK(a.bit_errors == b.bit_errors);
            CHECK(a.iterations == b.iterations);
            CHECK(a.bits == 64);
        }
    }
    SECTION("detectors share the frame") {
        const Scheme s(cfg.scheme_params(SchemeKind::afdm));
        const Frame a = draw_frame(cfg, s, 6.0, 3);
        const Frame b = draw_frame(cfg, s, 6.0, 3);
        CHECK(a.bits == b.bits);
        CHECK(test::max_diff(a.y, b.y) == 0.0);
        CHECK(draw_frame(cfg, s, 6.0, 4).bits != a.bits);
    }
    SECTION("static single path without noise decodes exactly") {
        SimConfig c = small_config();
        c.channel.paths = 1;
        c.channel.tau_max_samples = 0.0;
        c.channel.velocity_kmh = 0.0;
        for (auto kind : {SchemeKind::ofdm, SchemeKind::otfs, SchemeKind::afdm, SchemeKind::ifdm}) {
            for (auto det : {DetectorKind::lmmse, DetectorKind::cd_oamp, DetectorKind::cd_mamp}) {
                const auto r = run_trial(c, kind, det, 300.0, 0);
                INFO(to_string(kind) << " / " << to_string(det) << ": " << r.error);
                CHECK(r.error.empty());
                CHECK(r.bit_errors == 0);
            }
        }
    }
    SECTION("SNR is symbol energy over noise density") {
        CHECK(noise_variance(0.0) == 1.0);
        CHECK(std::abs(noise_variance(10.0) - 0.1) < 1e-15);
        const Frame f = draw_frame(cfg, Scheme(cfg.scheme_params(SchemeKind::ofdm)), 10.0, 0);
        CHECK(f.sigma2 == noise_variance(10.0));
    }
}

TEST_CASE("sweeps", "[harness][sweep]") {
    SECTION("single-frame stop rule") {
        SimConfig cfg = small_config();
        cfg.stop = {0, 1};
        const auto recs = sweep(cfg);
        REQUIRE(recs.size() == 8);
        for (const auto& r : recs) CHECK(r.frames == 1);
        // scheme, then detector, then SNR
        CHECK(recs[0].scheme == SchemeKind::ifdm);
        CHECK(recs[1].snr_db == 10.0);
        CHECK(recs[2].detector == DetectorKind::lmmse);
        CHECK(recs[4].scheme == SchemeKind::ofdm);
    }
    SECTION("records are consistent") {
        const auto recs = sweep(small_config());
        for (const auto& r : recs) {
            CHECK(r.bits == r.frames * 64);
            CHECK(r.bit_errors <= r.bits);
            CHECK(r.ci_lo <= r.ber);
            CHECK(r.ber <= r.ci_hi);
            CHECK(r.frames <= 24);
            CHECK((r.bit_errors >= 30 || r.frames == 24));
            CHECK(r.ber == static_cast<double>(r.bit_errors) / static_cast<double>(r.bits));
        }
    }
    SECTION("output does not depend on the worker count") {
        const SimConfig cfg = small_config();
        std::string reference;
        for (std::size_t workers : {1, 2, 3}) {
            SweepOptions opt;
            opt.workers = workers;
            opt.batch = 5;
            opt.record_timing = false;
            const auto csv = ber_csv(cfg, sweep(cfg, opt));
            if (reference.empty()) reference = csv;
            CHECK(csv == reference);
        }
    }
    SECTION("cancellation keeps finished points") {
        SimConfig cfg = small_config();
        std::atomic<bool> cancel{false};
        SweepOptions opt;
        opt.cancel = &cancel;
        opt.on_record = [&](const BerRecord&) { cancel = true; };
        CHECK(sweep(cfg, opt).size() == 1);
    }
    SECTION("CSV layout") {
        const SimConfig cfg = small_config();
        BerRecord r;
        r.snr_db = 6.0;
        r.bits = 640;
        r.bit_errors = 64;
        r.ber = 0.1;
        r.frames = 10;
        const auto csv = ber_csv(cfg, {r});
        CHECK(csv.rfind(std::string(ber_csv_header) + "\n", 0) == 0);
        CHECK(csv.find("\nifdm,cd-mamp,1,1,32,qpsk,300,6,640,64,0.1,") != std::string::npos);
        CHECK(config_hash(cfg) == config_hash(config_from_json(config_to_json(cfg))));
        SimConfig other = cfg;
        other.seed += 1;
        CHECK(config_hash(cfg) != config_hash(other));
    }
}

TEST_CASE("curve comparison", "[harness][compare]") {
    SECTION("known shift") {
        const auto cmp = compare_curves({synthetic_curve("a", 0.0), synthetic_curve("b", 3.0)}, 1e-2);
        REQUIRE(cmp.gaps.size() == 1);
        CHECK(std::abs(cmp.gaps[0].gap_db - 3.0) < 0.01);
        CHECK(cmp.warnings.empty());
    }
    SECTION("identical curves") {
        const auto cmp = compare_curves({synthetic_curve("a", 1.0), synthetic_curve("b", 1.0)}, 3e-3);
        REQUIRE(cmp.gaps.size() == 1);
        CHECK(std::abs(cmp.gaps[0].gap_db) < 1e-12);
    }
    SECTION("target outside the measured range") {
        const auto cmp = compare_curves({synthetic_curve("a", 0.0), synthetic_curve("b", 3.0)}, 1e-6);
        CHECK(cmp.gaps.empty());
        CHECK(cmp.warnings.size() == 2);
    }
    SECTION("CSV round trip") {
        SimConfig cfg = small_config();
        std::vector<BerRecord> recs;
        for (double snr : {4.0, 8.0, 12.0}) {
            BerRecord r;
            r.snr_db = snr;
            r.ber = std::pow(10.0, -snr / 4.0);
            recs.push_back(r);
        }
        std::istringstream in(ber_csv(cfg, recs));
        const auto curves = read_ber_csv(in, "run");
        REQUIRE(curves.size() == 1);
        CHECK(curves[0].label == "run:ifdm/cd-mamp/1/1/32/qpsk/300");
        CHECK(std::abs(*snr_at_ber(curves[0], 1e-2) - 8.0) < 1e-9);
    }
}

TEST_CASE("Gaussianity probe and Q-Q table", "[harness][probes]") {
    SECTION("identity channel errors are Gaussian") {
        SimConfig cfg;
        cfg.schemes = {SchemeKind::ifdm};
        cfg.n = 1024;
        cfg.channel.paths = 1;
        cfg.channel.tau_max_samples = 0.0;
        cfg.channel.velocity_kmh = 0.0;
        // 256 frames give about 5e5 samples, so 0.02 is roughly 5 sigma even at the outer quantiles
        const auto rep = gaussianity_probe(cfg, 5.0, 256);
        REQUIRE(rep.pre_samples.size() >= 500000);
        const auto rows = qq_table(rep.pre_samples, rep.post_samples);
        REQUIRE(rows.size() == 49);
        CHECK(std::abs(rows[24].theoretical) < 1e-12);
        for (const auto& r : rows) {
            INFO("theoretical " << r.theoretical);
            CHECK(std::abs(r.pre - r.theoretical) < 0.02);
            CHECK(std::abs(r.post - r.theoretical) < 0.02);
        }
    }
    SECTION("TSV format") {
        std::ostringstream os;
        write_qq_tsv(os, {{-1.0, -0.5, 0.25}, {0.0, 1.0 / 3.0, 2.0}});
        CHECK(os.str() == "theoretical\tpre\tpost\n-1.000000\t-0.500000\t0.250000\n0.000000\t0.333333\t2.000000\n");
    }
}

TEST_CASE("runtime profile", "[harness][probes]") {
    SimConfig cfg;
    cfg.schemes = {SchemeKind::ifdm};
    RuntimeOptions ro;
    ro.n_grid = {16, 32};
    ro.groups = 1;
    ro.calls_per_group = 2;
    ro.iterations = 2;
    const auto rows = runtime_profile(cfg, ro);
    REQUIRE(rows.size() == 6);
    for (const auto& r : rows) {
        CHECK(r.micros > 0.0);
        CHECK((r.n == 16 || r.n == 32));
    }
}

TEST_CASE("oracle suites", "[harness][oracle]") {
    SECTION("report schema") {
        const auto rep = run_oracle_suite("small");
        CHECK(rep.passed());
        const auto j = to_json(rep);
        CHECK(j.at("suite") == "small");
        CHECK(j.at("passed") == true);
        REQUIRE(!j.at("checks").empty());
        for (const auto& c : j.at("checks")) {
            for (const char* key : {"name", "passed", "value", "tolerance", "detail"}) CHECK(c.contains(key));
        }
    }
    SECTION("a broken transform is reported by name") {
        OracleHooks hooks;
        hooks.modulate = [](const Scheme& s, const cvec& v) {
            cvec out = s.modulate(v);
            if (s.kind() == SchemeKind::afdm) out[1] *= cplx(0.0, 1.0);
            return out;
        };
        const auto rep = run_oracle_suite("small", hooks);
        CHECK_FALSE(rep.passed());
        bool named = false;
        for (const auto& c : rep.checks) {
            if (c.name == "afdm.modulate_matches_dense") named = !c.passed;
            if (c.name.rfind("ofdm.", 0) == 0) CHECK(c.passed);
        }
        CHECK(named);
    }
    SECTION("unknown suite") { CHECK_THROWS_AS(run_oracle_suite("nope"), std::invalid_argument); }
}

TEST_CASE("desk configuration puts every scheme in one table", "[harness][sweep]") {
    std::ifstream in(std::string(WAVEFORMLAB_CONFIG_DIR) + "/fig6a_desk.json");
    std::stringstream ss;
    ss << in.rdbuf();
    SimConfig cfg = config_from_text(ss.str());
    cfg.stop = {0, 2};
    cfg.snr_db = {cfg.snr_db.front(), cfg.snr_db.back()};
    std::istringstream csv(ber_csv(cfg, sweep(cfg)));
    const auto curves = read_ber_csv(csv);
    REQUIRE(curves.size() == 4);
    std::set<std::string> schemes;
    for (const auto& c : curves) {
        schemes.insert(c.label.substr(0, c.label.find('/')));
        CHECK(c.points.size() == 2);
    }
    CHECK(schemes == std::set<std::string>{"ifdm", "otfs", "afdm", "ofdm"});
}
