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

#include "waveformlab/channel/time_channel.hpp"
#include "waveformlab/numerics/fft.hpp"
#include "waveformlab/numerics/permutation.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace wfl {

enum class SchemeKind { ofdm, otfs, afdm, ifdm };

inline std::string_view to_string(SchemeKind k) {
    switch (k) {
        case SchemeKind::ofdm: return "ofdm";
        case SchemeKind::otfs: return "otfs";
        case SchemeKind::afdm: return "afdm";
        case SchemeKind::ifdm: return "ifdm";
    }
    return "?";
}

inline std::optional<SchemeKind> parse_scheme(std::string_view s) {
    if (s == "ofdm") return SchemeKind::ofdm;
    if (s == "otfs") return SchemeKind::otfs;
    if (s == "afdm") return SchemeKind::afdm;
    if (s == "ifdm") return SchemeKind::ifdm;
    return std::nullopt;
}

struct SchemeParams {
    SchemeKind kind = SchemeKind::ifdm;
    std::size_t n = 64;
    std::size_t otfs_k = 0;   // delay bins; N = K * L
    std::size_t otfs_l = 0;   // Doppler bins
    double c1 = 0.0;
    double c2 = 0.0;
    std::uint64_t perm_seed = 1;
};

/// AFDM chirp rates: c1 = (2 ceil(alpha) + 1) / (2N) with alpha = nu_max N Ts
/// the normalized maximum Doppler, c2 = 1 / (2 N^2).
inline std::pair<double, double> afdm_default_chirps(std::size_t n, double nu_max, double sample_interval) {
    const auto nn = static_cast<double>(n);
    const double alpha = nu_max * nn * sample_interval;
    const double c1 = (2.0 * std::ceil(alpha - 1e-12) + 1.0) / (2.0 * nn);
    return {c1, 1.0 / (2.0 * nn * nn)};
}

/// One multicarrier block transform. modulate maps N symbols to N time samples
/// and is unitary for every kind:
///   OFDM  x = F^H s
///   OTFS  x = (F_L^H kron I_K) vec(S), S the K x L grid stored column-major
///   AFDM  x = Lc1^H F^H Lc2^H s,  Lc = diag(e^{-j 2 pi c n^2})
///   IFDM  x = P F^H s
class Scheme {
public:
    explicit Scheme(SchemeParams params) : params_(params) {
        detail::require(params_.n >= 1, "Scheme: N must be at least 1");
        fft_ = std::make_shared<FftPlan>(params_.n);
        switch (params_.kind) {
            case SchemeKind::otfs:
                detail::require(params_.otfs_k * params_.otfs_l == params_.n, "Scheme: OTFS requires N = K * L");
                fft_l_ = std::make_shared<FftPlan>(params_.otfs_l);
                break;
            case SchemeKind::afdm: {
                chirp1_.resize(static_cast<Eigen::Index>(params_.n));
                chirp2_.resize(static_cast<Eigen::Index>(params_.n));
                for (std::size_t k = 0; k < params_.n; ++k) {
                    const auto k2 = static_cast<double>(k) * static_cast<double>(k);
                    chirp1_[static_cast<Eigen::Index>(k)] = std::polar(1.0, -2.0 * pi * std::fmod(params_.c1 * k2, 1.0));
                    chirp2_[static_cast<Eigen::Index>(k)] = std::polar(1.0, -2.0 * pi * std::fmod(params_.c2 * k2, 1.0));
                }
                break;
            }
            case SchemeKind::ifdm: perm_ = random_permutation(params_.n, params_.perm_seed); break;
            case SchemeKind::ofdm: break;
        }
    }

    Scheme(SchemeParams params, PermutationMap perm) : Scheme(params) {
        detail::require(params_.kind == SchemeKind::ifdm && perm.size() == params_.n,
                        "Scheme: explicit permutation needs an IFDM scheme of matching size");
        perm_ = std::move(perm);
    }

    SchemeKind kind() const { return params_.kind; }
    std::size_t size() const { return params_.n; }
    const SchemeParams& params() const { return params_; }
    const PermutationMap& permutation() const { return perm_; }

    PrefixRule prefix_rule() const {
        if (params_.kind == SchemeKind::afdm) return {PrefixMode::chirp_periodic, params_.c1};
        return {};
    }

    cvec modulate(const cvec& s) const {
        detail::require_size(static_cast<std::size_t>(s.size()), params_.n, "modulate");
        switch (params_.kind) {
            case SchemeKind::ofdm: return fft_->apply(s, true);
            case SchemeKind::ifdm: return perm_.apply(fft_->apply(s, true));
            case SchemeKind::afdm: {
                cvec t = s.cwiseProduct(chirp2_.conjugate());
                fft_->transform_in_place(t, true);
                return t.cwiseProduct(chirp1_.conjugate());
            }
            case SchemeKind::otfs: return otfs_rows(s, true);
        }
        return {};
    }

    cvec demodulate(const cvec& y) const {
        detail::require_size(static_cast<std::size_t>(y.size()), params_.n, "demodulate");
        switch (params_.kind) {
            case SchemeKind::ofdm: return fft_->apply(y, false);
            case SchemeKind::ifdm: return fft_->apply(perm_.apply_inverse(y), false);
            case SchemeKind::afdm: {
                cvec t = y.cwiseProduct(chirp1_);
                fft_->transform_in_place(t, false);
                return t.cwiseProduct(chirp2_);
            }
            case SchemeKind::otfs: return otfs_rows(y, false);
        }
        return {};
    }

private:
    // Transform each delay row of the column-major K x L grid along Doppler.
    cvec otfs_rows(const cvec& v, bool inverse) const {
        const auto k_bins = static_cast<Eigen::Index>(params_.otfs_k);
        const auto l_bins = static_cast<Eigen::Index>(params_.otfs_l);
        cvec out(v.size());
        cvec row(l_bins);
        for (Eigen::Index k = 0; k < k_bins; ++k) {
            for (Eigen::Index l = 0; l < l_bins; ++l) row[l] = v[l * k_bins + k];
            fft_l_->transform_in_place(row, inverse);
            for (Eigen::Index l = 0; l < l_bins; ++l) out[l * k_bins + k] = row[l];
        }
        return out;
    }

    SchemeParams params_;
    std::shared_ptr<const FftPlan> fft_;
    std::shared_ptr<const FftPlan> fft_l_;
    cvec chirp1_;
    cvec chirp2_;
    PermutationMap perm_;
};

/// A scheme applied independently to consecutive length-N segments (one per
/// antenna), i.e. a block-diagonal transform.
class SegmentedScheme {
public:
    SegmentedScheme(Scheme scheme, std::size_t segments) : scheme_(std::move(scheme)), segments_(segments) {
        detail::require(segments_ >= 1, "SegmentedScheme: need at least one segment");
    }

    const Scheme& scheme() const { return scheme_; }
    std::size_t segments() const { return segments_; }
    std::size_t size() const { return segments_ * scheme_.size(); }

    cvec modulate(const cvec& s) const { return per_segment(s, true); }
    cvec demodulate(const cvec& y) const { return per_segment(y, false); }

private:
    cvec per_segment(const cvec& v, bool forward) const {
        detail::require_size(static_cast<std::size_t>(v.size()), size(), "SegmentedScheme");
        if (segments_ == 1) return forward ? scheme_.modulate(v) : scheme_.demodulate(v);
        const auto n = static_cast<Eigen::Index>(scheme_.size());
        cvec out(v.size());
        for (std::size_t j = 0; j < segments_; ++j) {
            const auto off = static_cast<Eigen::Index>(j) * n;
            out.segment(off, n) = forward ? scheme_.modulate(v.segment(off, n)) : scheme_.demodulate(v.segment(off, n));
        }
        return out;
    }

    Scheme scheme_;
    std::size_t segments_;
};

}  // namespace wfl
