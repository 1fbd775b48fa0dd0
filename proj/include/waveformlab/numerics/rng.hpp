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

#include <array>
#include <cmath>
#include <cstdint>

namespace wfl {

/// SplitMix64 finalizer. Used for seeding and for hashing trial coordinates.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Combine coordinates into one 64-bit seed:
///   mix(mix(mix(a) ^ b) ^ c)
constexpr std::uint64_t derive_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
    return splitmix64_mix(splitmix64_mix(splitmix64_mix(a) ^ b) ^ c);
}

/// xoshiro256** with SplitMix64 state expansion.
///
/// The stream is fully specified so experiments replay bit-identically on any
/// platform:
///  - seeding: state[i] = splitmix64 output i (i = 0..3) where the splitmix64
///    counter starts at `seed` and advances by 0x9e3779b97f4a7c15 before
///    each output;
///  - next_u64: reference xoshiro256** (rotl(s1 * 5, 7) * 9);
///  - uniform01: (next_u64() >> 11) * 2^-53, in [0, 1);
///  - uniform_below(b): rejection sampling, discard r < (2^64 - b) mod b,
///    then return r mod b;
///  - normal_pair: Box-Muller on (u1, u2), u1 redrawn while zero.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t counter = seed;
        for (auto& word : s_) {
            counter += 0x9e3779b97f4a7c15ULL;
            word = splitmix64_mix(counter);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    std::uint64_t uniform_below(std::uint64_t bound) {
        detail::require(bound > 0, "uniform_below: bound must be positive");
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    std::array<double, 2> normal_pair() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        return {radius * std::cos(2.0 * pi * u2), radius * std::sin(2.0 * pi * u2)};
    }

    /// Circularly symmetric CN(0, variance).
    cplx complex_normal(double variance) {
        const auto [a, b] = normal_pair();
        const double scale = std::sqrt(variance / 2.0);
        return {scale * a, scale * b};
    }

    cvec complex_normal_vector(std::size_t n, double variance) {
        cvec out(static_cast<Eigen::Index>(n));
        for (auto& v : out) v = complex_normal(variance);
        return out;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

}  // namespace wfl
