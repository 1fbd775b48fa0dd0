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

#include "waveformlab/numerics/fft.hpp"
#include "waveformlab/numerics/rng.hpp"

#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

namespace wfl {

/// Interleaver. As a matrix, row i of the permutation has its one at column
/// forward[i], so (P v)[i] = v[forward[i]].
class PermutationMap {
public:
    PermutationMap() = default;

    PermutationMap(std::vector<std::size_t> forward, std::uint64_t seed) : forward_(std::move(forward)), seed_(seed) {
        detail::require(!forward_.empty(), "PermutationMap: empty permutation");
        inverse_.assign(forward_.size(), forward_.size());
        for (std::size_t i = 0; i < forward_.size(); ++i) {
            detail::require(forward_[i] < forward_.size() && inverse_[forward_[i]] == forward_.size(),
                            "PermutationMap: not a bijection");
            inverse_[forward_[i]] = i;
        }
    }

    static PermutationMap identity(std::size_t n) {
        std::vector<std::size_t> f(n);
        std::iota(f.begin(), f.end(), std::size_t{0});
        return {std::move(f), 0};
    }

    std::size_t size() const { return forward_.size(); }
    std::uint64_t seed() const { return seed_; }
    const std::vector<std::size_t>& forward() const { return forward_; }
    const std::vector<std::size_t>& inverse() const { return inverse_; }

    cvec apply(const cvec& v) const {
        detail::require_size(static_cast<std::size_t>(v.size()), size(), "PermutationMap::apply");
        cvec out(v.size());
        for (std::size_t i = 0; i < size(); ++i) out[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(forward_[i])];
        return out;
    }

    cvec apply_inverse(const cvec& v) const {
        detail::require_size(static_cast<std::size_t>(v.size()), size(), "PermutationMap::apply_inverse");
        cvec out(v.size());
        for (std::size_t i = 0; i < size(); ++i) out[static_cast<Eigen::Index>(forward_[i])] = v[static_cast<Eigen::Index>(i)];
        return out;
    }

    rmat to_dense() const {
        const auto n = static_cast<Eigen::Index>(size());
        rmat p = rmat::Zero(n, n);
        for (std::size_t i = 0; i < size(); ++i) p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(forward_[i])) = 1.0;
        return p;
    }

    friend bool operator==(const PermutationMap& a, const PermutationMap& b) { return a.forward_ == b.forward_; }

private:
    std::vector<std::size_t> forward_;
    std::vector<std::size_t> inverse_;
    std::uint64_t seed_ = 0;
};

/// Fisher-Yates shuffle of the identity driven by Rng(seed): for i = n-1 down
/// to 1, swap entries i and uniform_below(i + 1).
inline PermutationMap random_permutation(std::size_t n, std::uint64_t seed) {
    detail::require(n >= 1, "random_permutation: n must be at least 1");
    std::vector<std::size_t> f(n);
    std::iota(f.begin(), f.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = n - 1; i >= 1; --i) {
        const auto k = static_cast<std::size_t>(rng.uniform_below(i + 1));
        std::swap(f[i], f[k]);
    }
    return {std::move(f), seed};
}

/// IF transform U = P F^H (forward) and its inverse F P^{-1}.
inline cvec if_transform(const cvec& s, const PermutationMap& perm, bool inverse, const FftPlan* plan = nullptr) {
    detail::require_size(static_cast<std::size_t>(s.size()), perm.size(), "if_transform");
    std::optional<FftPlan> local;
    if (!plan) plan = &local.emplace(perm.size());
    if (!inverse) return perm.apply(plan->apply(s, true));
    return plan->apply(perm.apply_inverse(s), false);
}

}  // namespace wfl
