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

#include <bit>
#include <cmath>
#include <memory>
#include <vector>

namespace wfl {

/// Unitary DFT of a fixed length.
///
/// Forward: X[k] = N^{-1/2} sum_n x[n] e^{-j 2 pi k n / N}; the inverse uses the
/// conjugate kernel with the same 1/sqrt(N) scaling. Power-of-two lengths run an
/// iterative radix-2 kernel; other lengths go through Bluestein's chirp-z
/// algorithm on a padded radix-2 plan.
class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n) {
        detail::require(n >= 1, "FftPlan: length must be at least 1");
        if (std::has_single_bit(n)) {
            build_radix2(n);
        } else {
            build_bluestein(n);
        }
    }

    std::size_t size() const { return n_; }

    cvec apply(const cvec& v, bool inverse) const {
        detail::require_size(static_cast<std::size_t>(v.size()), n_, "unitary_fft");
        cvec out = v;
        transform_in_place(out, inverse);
        return out;
    }

    void transform_in_place(cvec& v, bool inverse) const {
        detail::require_size(static_cast<std::size_t>(v.size()), n_, "unitary_fft");
        if (n_ == 1) return;
        if (!bluestein_) {
            radix2(v, inverse);
        } else {
            bluestein(v, inverse);
        }
        v *= 1.0 / std::sqrt(static_cast<double>(n_));
    }

private:
    void build_radix2(std::size_t n) {
        bitrev_.resize(n);
        const int bits = std::countr_zero(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (int b = 0; b < bits; ++b) {
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
            }
            bitrev_[i] = r;
        }
        twiddle_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            twiddle_[k] = std::polar(1.0, -2.0 * pi * static_cast<double>(k) / static_cast<double>(n));
        }
    }

    // Unnormalized in-place radix-2 DFT (sign set by `inverse`).
    void radix2(cvec& v, bool inverse) const {
        const std::size_t n = bitrev_.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (i < bitrev_[i]) std::swap(v[static_cast<Eigen::Index>(i)], v[static_cast<Eigen::Index>(bitrev_[i])]);
        }
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const std::size_t half = len / 2;
            const std::size_t stride = n / len;
            for (std::size_t start = 0; start < n; start += len) {
                for (std::size_t k = 0; k < half; ++k) {
                    cplx w = twiddle_[k * stride];
                    if (inverse) w = std::conj(w);
                    const auto a = static_cast<Eigen::Index>(start + k);
                    const auto b = static_cast<Eigen::Index>(start + k + half);
                    const cplx t = w * v[b];
                    v[b] = v[a] - t;
                    v[a] += t;
                }
            }
        }
    }

    void build_bluestein(std::size_t n) {
        bluestein_ = true;
        std::size_t m = 1;
        while (m < 2 * n - 1) m <<= 1;
        inner_ = std::make_unique<FftPlan>(m);
        chirp_.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            // k^2 mod 2n keeps the phase argument small for large n.
            const auto k2 = static_cast<double>((k * k) % (2 * n));
            chirp_[k] = std::polar(1.0, -pi * k2 / static_cast<double>(n));
        }
        kernel_ = cvec::Zero(static_cast<Eigen::Index>(m));
        kernel_[0] = std::conj(chirp_[0]);
        for (std::size_t k = 1; k < n; ++k) {
            kernel_[static_cast<Eigen::Index>(k)] = std::conj(chirp_[k]);
            kernel_[static_cast<Eigen::Index>(m - k)] = std::conj(chirp_[k]);
        }
        inner_->radix2(kernel_, false);
    }

    void bluestein(cvec& v, bool inverse) const {
        const std::size_t m = inner_->n_;
        cvec a = cvec::Zero(static_cast<Eigen::Index>(m));
        for (std::size_t k = 0; k < n_; ++k) {
            const cplx c = inverse ? std::conj(chirp_[k]) : chirp_[k];
            a[static_cast<Eigen::Index>(k)] = v[static_cast<Eigen::Index>(k)] * c;
        }
        inner_->radix2(a, false);
        if (inverse) {
            // conj kernel spectrum: FFT(conj(b))[k] = conj(FFT(b)[-k])
            for (std::size_t k = 0; k < m; ++k) {
                a[static_cast<Eigen::Index>(k)] *= std::conj(kernel_[static_cast<Eigen::Index>((m - k) % m)]);
            }
        } else {
            a.array() *= kernel_.array();
        }
        inner_->radix2(a, true);
        const double scale = 1.0 / static_cast<double>(m);
        for (std::size_t k = 0; k < n_; ++k) {
            const cplx c = inverse ? std::conj(chirp_[k]) : chirp_[k];
            v[static_cast<Eigen::Index>(k)] = a[static_cast<Eigen::Index>(k)] * c * scale;
        }
    }

    std::size_t n_;
    std::vector<std::size_t> bitrev_;
    std::vector<cplx> twiddle_;
    bool bluestein_ = false;
    std::unique_ptr<FftPlan> inner_;
    std::vector<cplx> chirp_;
    cvec kernel_;
};

/// Unitary FFT / IFFT sized by the input.
inline cvec unitary_fft(const cvec& v, bool inverse) {
    detail::require(v.size() > 0, "unitary_fft: empty input");
    return FftPlan(static_cast<std::size_t>(v.size())).apply(v, inverse);
}

/// Dense unitary DFT matrix F with F[k, n] = N^{-1/2} e^{-j 2 pi k n / N}.
inline cmat dft_matrix(std::size_t n) {
    cmat f(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t m = 0; m < n; ++m) {
            const auto km = static_cast<double>((k * m) % n);
            f(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) =
                std::polar(scale, -2.0 * pi * km / static_cast<double>(n));
        }
    }
    return f;
}

}  // namespace wfl
