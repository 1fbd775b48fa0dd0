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

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wfl {

struct BerPoint {
    double snr_db;
    double ber;
};

/// One BER curve; the label joins the non-SNR key columns of a result CSV.
struct BerCurve {
    std::string label;
    std::vector<BerPoint> points;  // ascending SNR
};

/// Reads result CSVs (header row first). Rows sharing scheme, detector,
/// antenna counts, N, modulation and velocity form one curve. `source`
/// prefixes the labels when non-empty.
inline std::vector<BerCurve> read_ber_csv(std::istream& in, const std::string& source = {}) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty BER table");
    const auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        return out;
    };
    const auto header = split(line);
    const auto column = [&](const char* name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw std::runtime_error(std::string("BER table lacks column '") + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::vector<std::size_t> keys{column("scheme"), column("detector"), column("Nt"), column("Nr"),
                                        column("N"),      column("mod"),      column("velocity_kmh")};
    const std::size_t snr_col = column("snr_db");
    const std::size_t ber_col = column("ber");

    std::map<std::string, BerCurve> curves;
    std::vector<std::string> order;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line);
        if (cells.size() < header.size()) throw std::runtime_error("short row in BER table: " + line);
        std::string label = source.empty() ? "" : source + ":";
        for (std::size_t i = 0; i < keys.size(); ++i) label += (i ? "/" : "") + cells[keys[i]];
        auto [it, fresh] = curves.try_emplace(label, BerCurve{label, {}});
        if (fresh) order.push_back(label);
        it->second.points.push_back({std::stod(cells[snr_col]), std::stod(cells[ber_col])});
    }
    std::vector<BerCurve> out;
    for (const auto& label : order) {
        BerCurve c = curves.at(label);
        std::sort(c.points.begin(), c.points.end(), [](const BerPoint& a, const BerPoint& b) { return a.snr_db < b.snr_db; });
        out.push_back(std::move(c));
    }
    return out;
}

/// SNR at which the curve crosses `target`, interpolating log10(BER) linearly
/// in SNR between the first bracketing pair. Empty when the curve does not
/// bracket the target or a bracketing point has zero BER.
inline std::optional<double> snr_at_ber(const BerCurve& curve, double target) {
    if (!(target > 0.0)) return std::nullopt;
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        const auto& a = curve.points[i];
        const auto& b = curve.points[i + 1];
        if (a.ber <= 0.0 || b.ber <= 0.0) continue;
        if (a.ber == target) return a.snr_db;
        if ((a.ber - target) * (b.ber - target) > 0.0) continue;
        if (a.ber == b.ber) return a.snr_db;
        const double la = std::log10(a.ber);
        const double lb = std::log10(b.ber);
        return a.snr_db + (std::log10(target) - la) * (b.snr_db - a.snr_db) / (lb - la);
    }
    if (!curve.points.empty() && curve.points.back().ber == target) return curve.points.back().snr_db;
    return std::nullopt;
}

struct CurveGap {
    std::string a;
    std::string b;
    double gap_db;  // SNR(b) - SNR(a): positive when a needs less SNR
};

struct Comparison {
    std::vector<std::pair<std::string, std::optional<double>>> snr;  // per curve
    std::vector<CurveGap> gaps;                                      // every pair where both cross
    std::vector<std::string> warnings;
};

inline Comparison compare_curves(const std::vector<BerCurve>& curves, double target) {
    Comparison out;
    for (const auto& c : curves) {
        out.snr.emplace_back(c.label, snr_at_ber(c, target));
        if (!out.snr.back().second) out.warnings.push_back("curve " + c.label + " does not bracket the target BER");
    }
    for (std::size_t i = 0; i < out.snr.size(); ++i) {
        for (std::size_t j = i + 1; j < out.snr.size(); ++j) {
            if (out.snr[i].second && out.snr[j].second) {
                out.gaps.push_back({out.snr[i].first, out.snr[j].first, *out.snr[j].second - *out.snr[i].second});
            }
        }
    }
    return out;
}

}  // namespace wfl
