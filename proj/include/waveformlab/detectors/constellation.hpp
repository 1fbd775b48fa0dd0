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

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wfl {

enum class Modulation { bpsk, qpsk, qam16 };

inline std::string_view to_string(Modulation m) {
    switch (m) {
        case Modulation::bpsk: return "bpsk";
        case Modulation::qpsk: return "qpsk";
        case Modulation::qam16: return "16qam";
    }
    return "?";
}

inline std::optional<Modulation> parse_modulation(std::string_view s) {
    if (s == "bpsk") return Modulation::bpsk;
    if (s == "qpsk") return Modulation::qpsk;
    if (s == "16qam") return Modulation::qam16;
    return std::nullopt;
}

/// Gray-labelled constellation with unit average energy. points[label] is the
/// symbol for the bit label read MSB first.
class Constellation {
public:
    static Constellation make(Modulation m) {
        switch (m) {
            case Modulation::bpsk: return {m, 1, {cplx{1.0, 0.0}, cplx{-1.0, 0.0}}};
            case Modulation::qpsk: {
                const double a = 1.0 / std::sqrt(2.0);
                // first bit -> in-phase sign, second bit -> quadrature sign
                return {m, 2, {cplx{a, a}, cplx{a, -a}, cplx{-a, a}, cplx{-a, -a}}};
            }
            case Modulation::qam16: {
                // two Gray bits per axis: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
                constexpr double level[4] = {-3.0, -1.0, 3.0, 1.0};
                const double scale = 1.0 / std::sqrt(10.0);
                std::vector<cplx> pts(16);
                for (unsigned label = 0; label < 16; ++label) {
                    pts[label] = cplx{level[label >> 2], level[label & 3u]} * scale;
                }
                return {m, 4, std::move(pts)};
            }
        }
        throw std::invalid_argument("Constellation: unknown modulation");
    }

    Modulation modulation() const { return mod_; }
    unsigned bits_per_symbol() const { return bits_; }
    const std::vector<cplx>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }

    double average_energy() const {
        double e = 0.0;
        for (const auto& p : points_) e += std::norm(p);
        return e / static_cast<double>(points_.size());
    }

    std::size_t nearest(cplx r) const {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const double d = std::norm(r - points_[i]);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

private:
    Constellation(Modulation m, unsigned bits, std::vector<cplx> pts) : mod_(m), bits_(bits), points_(std::move(pts)) {}

    Modulation mod_;
    unsigned bits_;
    std::vector<cplx> points_;
};

inline cvec map_bits(std::span<const std::uint8_t> bits, const Constellation& c) {
    const unsigned k = c.bits_per_symbol();
    detail::require(bits.size() % k == 0, "map_bits: bit count " + std::to_string(bits.size()) +
                                              " not divisible by bits per symbol " + std::to_string(k));
    cvec out(static_cast<Eigen::Index>(bits.size() / k));
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        unsigned label = 0;
        for (unsigned b = 0; b < k; ++b) label = (label << 1) | (bits[static_cast<std::size_t>(i) * k + b] & 1u);
        out[i] = c.points()[label];
    }
    return out;
}

/// Nearest-point decisions back to bits.
inline std::vector<std::uint8_t> demap_hard(const cvec& symbols, const Constellation& c) {
    const unsigned k = c.bits_per_symbol();
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(symbols.size()) * k);
    for (Eigen::Index i = 0; i < symbols.size(); ++i) {
        const auto label = c.nearest(symbols[i]);
        for (unsigned b = 0; b < k; ++b) {
            bits[static_cast<std::size_t>(i) * k + b] = static_cast<std::uint8_t>((label >> (k - 1 - b)) & 1u);
        }
    }
    return bits;
}

}  // namespace wfl
