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
//
// Draws one mobile channel, prints how each scheme sees it, and runs every
// detector on one frame.
//
//   channel_demo [N] [velocity_kmh] [snr_db] [dump.json]

#include "waveformlab/waveformlab.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

// min / max row energy of a dense effective channel
double row_energy_spread(const wfl::cmat& m) {
    const wfl::rvec e = m.rowwise().squaredNorm();
    return e.maxCoeff() > 0.0 ? e.minCoeff() / e.maxCoeff() : 0.0;
}

double off_diagonal_fraction(const wfl::cmat& m) {
    const double total = m.squaredNorm();
    return total > 0.0 ? (total - m.diagonal().squaredNorm()) / total : 0.0;
}

}  // namespace

int main(int argc, char** argv) {
    wfl::SimConfig cfg;
    cfg.schemes = {wfl::SchemeKind::ifdm, wfl::SchemeKind::otfs, wfl::SchemeKind::afdm, wfl::SchemeKind::ofdm};
    cfg.n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 64;
    cfg.channel.velocity_kmh = argc > 2 ? std::atof(argv[2]) : 300.0;
    const double snr = argc > 3 ? std::atof(argv[3]) : 12.0;
    try {
        wfl::validate(cfg);
    } catch (const wfl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    std::printf("N=%zu  v=%.0f km/h  nu_max=%.1f Hz  Ts=%.3g s  SNR=%.1f dB\n", cfg.n, cfg.channel.velocity_kmh,
                cfg.nu_max(), cfg.sample_interval(), snr);

    for (auto kind : cfg.schemes) {
        const wfl::Scheme scheme(cfg.scheme_params(kind));
        const wfl::Frame f = wfl::draw_frame(cfg, scheme, snr, 0);
        const auto& h = f.channel.block(0, 0);
        if (kind == cfg.schemes.front()) {
            std::printf("paths=%d  taps P=%zu  time invariant=%s\n\n", cfg.channel.paths, h.tap_count(),
                        h.time_invariant() ? "yes" : "no");
            std::printf("%-5s %14s %16s %10s %10s %10s\n", "", "row spread", "off-diag energy", "lmmse", "cd-oamp",
                        "cd-mamp");
            if (argc > 4) {
                std::ofstream(argv[4]) << wfl::channel_to_json(h).dump() << '\n';
            }
        }
        const wfl::cmat heff = wfl::effective_channel(f.scheme, f.channel).to_dense();
        std::printf("%-5s %14.3f %16.3f", std::string(wfl::to_string(kind)).c_str(), row_energy_spread(heff),
                    off_diagonal_fraction(heff));
        const wfl::Constellation c = wfl::Constellation::make(cfg.modulation);
        for (auto det : {wfl::DetectorKind::lmmse, wfl::DetectorKind::cd_oamp, wfl::DetectorKind::cd_mamp}) {
            const auto r = wfl::detect_frame(cfg, det, f, 1);
            const auto bits = wfl::demap_hard(r.decisions, c);
            std::size_t errors = 0;
            for (std::size_t i = 0; i < bits.size(); ++i) errors += bits[i] != f.bits[i];
            std::printf(" %10zu", errors);
        }
        std::printf("\n");
    }
    std::printf("\n(bit errors out of %zu per frame)\n",
                cfg.n * wfl::Constellation::make(cfg.modulation).bits_per_symbol());
    return 0;
}
