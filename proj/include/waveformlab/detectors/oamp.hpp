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

#include "waveformlab/detectors/denoiser.hpp"
#include "waveformlab/detectors/mamp.hpp"
#include "waveformlab/detectors/trace.hpp"
#include "waveformlab/waveforms/scheme.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <limits>

namespace wfl {

struct OampConfig {
    int max_iterations = 20;
    double tol = 1e-6;
};

/// De-correlated LMMSE step r = x + (N / tr(W H)) W (y - H x) with
/// W = v H^H (v H H^H + s2 I)^{-1}.
///
/// H H^H is diagonalized once so that every iteration costs two dense
/// mat-vecs with the eigenbasis.
class OampLinearStep {
public:
    OampLinearStep(cmat h, double sigma2) : h_(std::move(h)), sigma2_(sigma2) {
        Eigen::SelfAdjointEigenSolver<cmat> eig(h_ * h_.adjoint());
        detail::require(eig.info() == Eigen::Success, "cd_oamp_detect: eigendecomposition failed");
        q_ = eig.eigenvectors();
        lambda_ = eig.eigenvalues().cwiseMax(0.0);
        hq_ = h_.adjoint() * q_;
        double tr = lambda_.sum();
        w0_ = tr / static_cast<double>(h_.cols());
    }

    const cmat& matrix() const { return h_; }
    double w0() const { return w0_; }

    struct Output {
        cvec r;
        double v_gamma = 0.0;
    };

    Output apply(const cvec& x, const cvec& residual, double v) const {
        const rvec filt = (v * lambda_.array() + sigma2_).inverse().matrix();
        const double tr = v * (lambda_.array() * filt.array()).sum();
        const double nd = static_cast<double>(h_.cols());
        detail::require(tr > 0.0 && std::isfinite(tr), "cd_oamp_detect: singular linear step");
        const cvec z = (q_.adjoint() * residual).cwiseProduct(filt.cast<cplx>());
        Output out;
        out.r = x + (nd / tr) * v * (hq_ * z);
        out.v_gamma = std::max(v * (nd / tr - 1.0), min_denoiser_variance);
        return out;
    }

private:
    cmat h_;
    double sigma2_;
    cmat q_;
    rvec lambda_;
    cmat hq_;
    double w0_ = 0.0;
};

/// CD-OAMP: de-correlated LMMSE in the time domain, orthogonalized MMSE
/// denoiser in the transform domain. Uses a dense copy of H.
template <LinearOperator Op>
DetectResult cd_oamp_detect(const SegmentedScheme& u, const Op& h, const cvec& y, double sigma2, const Constellation& c,
                            const OampConfig& cfg = {}, const DetectOptions& opt = {}) {
    detail::require(u.size() == h.cols(), "cd_oamp_detect: transform size must match channel columns");
    detail::require(static_cast<std::size_t>(y.size()) == h.rows(), "cd_oamp_detect: observation length mismatch");
    const OampLinearStep step(materialize(h), sigma2);
    const int t_max = std::max(cfg.max_iterations, 1);
    const double nd = static_cast<double>(h.cols());
    const double delta = static_cast<double>(h.rows()) / nd;

    DetectResult result;
    auto& trace = result.trace;
    result.posterior_mean = cvec::Zero(static_cast<Eigen::Index>(u.size()));
    if (step.w0() <= 0.0) {
        trace.degenerate = true;
        result.decisions = detail::hard_decisions(result.posterior_mean, c);
        return result;
    }

    std::optional<cvec> x_true;
    if (opt.truth_symbols) x_true = u.modulate(*opt.truth_symbols);

    cvec x = cvec::Zero(static_cast<Eigen::Index>(h.cols()));
    cvec residual = y;
    double v = 1.0;
    for (int t = 1; t <= t_max; ++t) {
        const auto started = std::chrono::steady_clock::now();
        const auto lin = step.apply(x, residual, v);
        IterationRecord rec;
        rec.t = t;
        rec.v_gamma = lin.v_gamma;

        const cvec r_sig = u.demodulate(lin.r);
        const cvec inputs[] = {x};
        if (opt.observer) opt.observer(IterationView{t, lin.r, r_sig, lin.v_gamma, inputs});
        if (x_true) {
            rec.max_error_corr = detail::max_abs_correlation(lin.r - *x_true, inputs, *x_true);
            rec.ks_pre = detail::ks_of_error(lin.r - *x_true, lin.v_gamma);
            rec.ks_stat = detail::ks_of_error(r_sig - *opt.truth_symbols, lin.v_gamma);
        }

        DenoiseResult den = mmse_denoise(r_sig, lin.v_gamma, c);
        rec.v_post = den.variance;
        result.posterior_mean = den.mean;
        trace.returned_iteration = t;

        const double p_phi = den.variance / lin.v_gamma;
        if (t == t_max || p_phi >= 1.0 - 1e-12) {
            rec.v_phi = v;
            rec.micros = detail::elapsed_micros(started);
            trace.iterations.push_back(std::move(rec));
            if (t < t_max) trace.converged = true;
            break;
        }

        x = u.modulate((den.mean - p_phi * r_sig) / (1.0 - p_phi));
        residual = y - step.matrix() * x;
        const double v_new = std::max((residual.squaredNorm() / nd - delta * sigma2) / step.w0(), min_denoiser_variance);
        rec.v_phi = v_new;
        rec.micros = detail::elapsed_micros(started);
        trace.iterations.push_back(std::move(rec));
        const bool settled = std::abs(v_new - v) <= cfg.tol * v;
        v = v_new;
        if (settled) {
            trace.converged = true;
            break;
        }
    }
    result.decisions = detail::hard_decisions(result.posterior_mean, c);
    return result;
}

}  // namespace wfl
