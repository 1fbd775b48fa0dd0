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

// Cross-domain memory AMP.
//
// The linear step is a memory matched filter that only touches H and H^H
// (sparse in the time domain); the nonlinear step is a symbol-wise MMSE
// denoiser in the transform domain. Both steps are orthogonalized so that the
// error of every output is uncorrelated with the errors of all inputs it was
// built from. With x_i = x + f_i the estimates fed to the filter:
//
//   r_hat_t = theta_t B r_hat_{t-1} + xi_t (y - H x_t),   B = lambda I - H H^H
//   r_t     = (H^H r_hat_t + sum_i p_{t,i} x_i) / eps_t
//
// Unrolled, r_hat_t = sum_i vt_{t,i} B^{t-i} (y - H x_i) with
// vt_{t,i} = xi_i prod_{k>i} theta_k. Choosing p_{t,i} = vt_{t,i} w_{t-i},
// w_k = tr(H H^H B^k) / N, removes the divergence of every f_i term, and
// eps_t = sum_i p_{t,i} makes r_t unbiased. The error covariance then is
//
//   v_gamma = 1/eps_t^2 sum_{i,j} vt_i vt_j (s2 w_{2t-i-j} + V_ij wb_{t-i,t-j})
//   wb_{a,b} = lambda w_{a+b} - w_{a+b+1} - w_a w_b
//
// theta_t = 1 / (lambda + s2 / V_tt) keeps the filter contractive and xi_t
// minimizes v_gamma in closed form.

#include "waveformlab/detectors/damping.hpp"
#include "waveformlab/detectors/denoiser.hpp"
#include "waveformlab/detectors/moments.hpp"
#include "waveformlab/detectors/trace.hpp"
#include "waveformlab/numerics/spectral.hpp"
#include "waveformlab/numerics/stats.hpp"
#include "waveformlab/waveforms/scheme.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace wfl {

struct MampConfig {
    int max_iterations = 20;
    double tol = 1e-6;              // relative change of the damped variance
    int damping_window = 3;
    double max_condition = 1e8;
    int power_iterations = 100;
    MomentOptions moments;
    std::optional<SpectralBounds> bounds;  // skip the power iteration when known
};

struct MampCoefficients {
    double lambda_dagger = 0.0;
    double theta = 0.0;
    double xi = 0.0;
    double epsilon = 0.0;
    std::vector<double> p;         // p_{t,1..t}
    std::vector<double> vartheta;  // vt_{t,1..t}
};

/// Filter history needed to form the coefficients of the next iteration.
struct MampHistory {
    std::vector<double> xi;     // xi_1..xi_{t-1}
    std::vector<double> theta;  // theta_1..theta_{t-1}
};

inline double mamp_lambda_dagger(const SpectralBounds& b) { return 0.5 * (b.lambda_min + b.lambda_max); }

/// wb_{a,b} = lambda w_{a+b} - w_{a+b+1} - w_a w_b.
inline double mamp_wbar(std::span<const double> w, double lambda, std::size_t a, std::size_t b) {
    return lambda * w[a + b] - w[a + b + 1] - w[a] * w[b];
}

/// Coefficients for iteration t = v_phi.rows(). `v_phi` is the error
/// covariance of the inputs x_1..x_t, `w` the trace moments up to order
/// 2t - 1. `p` follows the sign convention r_t = (H^H r_hat + X p) / eps.
inline MampCoefficients mamp_coefficients(const SpectralBounds& bounds, std::span<const double> w, double sigma2,
                                          const rmat& v_phi, const MampHistory& history) {
    const auto t = static_cast<std::size_t>(v_phi.rows());
    detail::require(t >= 1 && history.xi.size() + 1 == t && history.theta.size() + 1 == t,
                    "mamp_coefficients: history length must be t - 1");
    detail::require(w.size() >= 2 * t, "mamp_coefficients: need trace moments up to order 2t - 1");
    MampCoefficients c;
    c.lambda_dagger = mamp_lambda_dagger(bounds);
    const double lambda = c.lambda_dagger;
    const double v_tt = std::max(v_phi(static_cast<Eigen::Index>(t - 1), static_cast<Eigen::Index>(t - 1)), 1e-300);
    c.theta = 1.0 / (lambda + sigma2 / v_tt);

    // vt_{t,i} for i < t
    c.vartheta.assign(t, 0.0);
    for (std::size_t i = 0; i + 1 < t; ++i) {
        double prod = history.xi[i];
        for (std::size_t k = i + 1; k + 1 < t; ++k) prod *= history.theta[k];
        c.vartheta[i] = prod * c.theta;
    }

    const double w0 = w[0];
    const auto lag = [t](std::size_t i) { return t - 1 - i; };  // t - i in 1-based terms
    if (t == 1) {
        c.xi = 1.0;
    } else {
        double c0 = 0.0;
        double c2 = 0.0;
        double c3 = 0.0;
        for (std::size_t i = 0; i + 1 < t; ++i) {
            c0 += c.vartheta[i] * w[lag(i)];
            c2 -= c.vartheta[i] *
                  (sigma2 * w[lag(i)] + v_phi(static_cast<Eigen::Index>(t - 1), static_cast<Eigen::Index>(i)) *
                                            mamp_wbar(w, lambda, 0, lag(i)));
            for (std::size_t j = 0; j + 1 < t; ++j) {
                c3 += c.vartheta[i] * c.vartheta[j] *
                      (sigma2 * w[lag(i) + lag(j)] + v_phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                                                         mamp_wbar(w, lambda, lag(i), lag(j)));
            }
        }
        c0 /= w0;
        const double c1 = sigma2 * w0 + v_tt * mamp_wbar(w, lambda, 0, 0);
        const double den = c1 * c0 + c2;
        const double num = c2 * c0 + c3;
        c.xi = (std::abs(den) > 1e-300 && std::isfinite(num / den)) ? num / den : 1.0;
    }
    c.vartheta[t - 1] = c.xi;

    c.p.assign(t, 0.0);
    for (std::size_t i = 0; i < t; ++i) {
        c.p[i] = c.vartheta[i] * w[lag(i)];
        c.epsilon += c.p[i];
    }
    return c;
}

/// Tracked variance of the memory filter output for the given coefficients.
inline double mamp_output_variance(const MampCoefficients& c, std::span<const double> w, double sigma2,
                                   const rmat& v_phi) {
    const auto t = c.vartheta.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = 0; j < t; ++j) {
            const std::size_t a = t - 1 - i;
            const std::size_t b = t - 1 - j;
            acc += c.vartheta[i] * c.vartheta[j] *
                   (sigma2 * w[a + b] +
                    v_phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * mamp_wbar(w, c.lambda_dagger, a, b));
        }
    }
    return acc / (c.epsilon * c.epsilon);
}

/// Recursion state of the memory matched filter.
struct MampState {
    int t = 0;
    std::vector<cvec> inputs;     // x_1..x_t (time domain)
    std::vector<cvec> residuals;  // y - H x_i
    rmat v_phi;                   // error covariance of the inputs
    cvec r_hat;                   // filter carry
    MampHistory history;
    double sigma2 = 0.0;
    double delta = 1.0;           // rows / cols
    SpectralBounds bounds;
    std::vector<double> w;

    /// t = 1 with x_1 = 0. Its variance is estimated from y like every later
    /// entry of V so that damping compares like with like.
    template <LinearOperator Op>
    static MampState start(const Op& h, const cvec& y, double sigma2, SpectralBounds bounds, std::vector<double> w) {
        MampState s;
        s.t = 1;
        s.sigma2 = sigma2;
        s.delta = static_cast<double>(h.rows()) / static_cast<double>(h.cols());
        s.bounds = bounds;
        s.w = std::move(w);
        s.inputs.push_back(cvec::Zero(static_cast<Eigen::Index>(h.cols())));
        s.residuals.push_back(y);
        s.v_phi = rmat::Constant(1, 1, std::max(s.residual_covariance(y, y), min_denoiser_variance));
        s.r_hat = cvec::Zero(static_cast<Eigen::Index>(h.rows()));
        return s;
    }

    /// Error covariance of two estimates from their residuals:
    /// ((y - H x_a)^H (y - H x_b) / N - delta s2) / w_0.
    double residual_covariance(const cvec& ra, const cvec& rb) const {
        const double n = static_cast<double>(inputs.front().size());
        return (std::real(ra.dot(rb)) / n - delta * sigma2) / w[0];
    }
};

struct MfOutput {
    cvec r;
    double v_gamma = 0.0;
    MampCoefficients coeffs;
    bool degenerate = false;
};

/// One memory matched filter step at iteration state.t. Advances the filter
/// carry; the caller appends the next input.
template <LinearOperator Op>
MfOutput memory_mf_step(MampState& state, const Op& h) {
    MfOutput out;
    out.coeffs = mamp_coefficients(state.bounds, state.w, state.sigma2, state.v_phi, state.history);
    const auto& c = out.coeffs;
    const double scale = std::abs(state.w[0]) > 0.0 ? std::abs(state.w[0]) : 1.0;
    if (!std::isfinite(c.epsilon) || std::abs(c.epsilon) < 1e-10 * scale) {
        out.degenerate = true;
        return out;
    }
    if (state.t > 1) {
        cvec b_r = c.lambda_dagger * state.r_hat - h.apply(h.apply_adjoint(state.r_hat));
        state.r_hat = c.theta * b_r + c.xi * state.residuals.back();
    } else {
        state.r_hat = c.xi * state.residuals.back();
    }
    out.r = h.apply_adjoint(state.r_hat);
    for (std::size_t i = 0; i < state.inputs.size(); ++i) out.r += c.p[i] * state.inputs[i];
    out.r /= c.epsilon;
    out.v_gamma = mamp_output_variance(c, state.w, state.sigma2, state.v_phi);
    if (!std::isfinite(out.v_gamma)) {
        out.degenerate = true;
        return out;
    }
    out.v_gamma = std::max(out.v_gamma, min_denoiser_variance);
    state.history.xi.push_back(c.xi);
    state.history.theta.push_back(c.theta);
    return out;
}

namespace detail {

inline double max_abs_correlation(const cvec& err, std::span<const cvec> inputs, const cvec& x) {
    double worst = 0.0;
    const double ne = err.norm();
    for (const auto& xi : inputs) {
        const cvec f = xi - x;
        const double nf = f.norm();
        if (ne == 0.0 || nf == 0.0) continue;
        worst = std::max(worst, std::abs(f.dot(err)) / (ne * nf));
    }
    return worst;
}

inline double ks_of_error(const cvec& err, double v) {
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(2 * err.size()));
    append_normalized_parts(err, v, samples);
    return ks_statistic(std::move(samples));
}

inline double elapsed_micros(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - since).count();
}

inline cvec hard_decisions(const cvec& v, const Constellation& c) {
    cvec out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = c.points()[c.nearest(v[i])];
    return out;
}

}  // namespace detail

/// CD-MAMP: memory matched filter on the time-domain channel, inverse
/// transform, orthogonalized MMSE denoiser, forward transform, damping.
/// `u` supplies the transform between symbols and time samples.
template <LinearOperator Op>
DetectResult cd_mamp_detect(const SegmentedScheme& u, const Op& h, const cvec& y, double sigma2, const Constellation& c,
                            const MampConfig& cfg = {}, const DetectOptions& opt = {}) {
    detail::require(u.size() == h.cols(), "cd_mamp_detect: transform size must match channel columns");
    detail::require(static_cast<std::size_t>(y.size()) == h.rows(), "cd_mamp_detect: observation length mismatch");
    const int t_max = std::max(cfg.max_iterations, 1);
    const SpectralBounds bounds = cfg.bounds ? *cfg.bounds : spectral_bounds(h, cfg.power_iterations);

    DetectResult result;
    auto& trace = result.trace;
    const auto n_sym = static_cast<Eigen::Index>(u.size());
    result.posterior_mean = cvec::Zero(n_sym);
    if (bounds.lambda_max <= 0.0) {
        trace.degenerate = true;
        result.decisions = detail::hard_decisions(result.posterior_mean, c);
        return result;
    }

    const double lambda = mamp_lambda_dagger(bounds);
    auto w = trace_moments(h, lambda, 2 * static_cast<std::size_t>(t_max), cfg.moments);
    MampState state = MampState::start(h, y, sigma2, bounds, std::move(w));

    std::optional<cvec> x_true;
    if (opt.truth_symbols) x_true = u.modulate(*opt.truth_symbols);

    cvec best_mean = result.posterior_mean;
    double best_var = std::numeric_limits<double>::infinity();
    int best_iter = 0;
    const std::size_t window = static_cast<std::size_t>(std::max(cfg.damping_window, 1));

    for (int t = 1; t <= t_max; ++t) {
        const auto started = std::chrono::steady_clock::now();
        state.t = t;
        MfOutput mf = memory_mf_step(state, h);
        if (mf.degenerate) {
            trace.degenerate = true;
            break;
        }
        IterationRecord rec;
        rec.t = t;
        rec.v_gamma = mf.v_gamma;

        const cvec r_sig = u.demodulate(mf.r);
        if (opt.observer) opt.observer(IterationView{t, mf.r, r_sig, mf.v_gamma, state.inputs});
        if (x_true) {
            rec.max_error_corr = detail::max_abs_correlation(mf.r - *x_true, state.inputs, *x_true);
            rec.ks_pre = detail::ks_of_error(mf.r - *x_true, mf.v_gamma);
            rec.ks_stat = detail::ks_of_error(r_sig - *opt.truth_symbols, mf.v_gamma);
        }

        DenoiseResult den = mmse_denoise(r_sig, mf.v_gamma, c);
        rec.v_post = den.variance;
        result.posterior_mean = den.mean;
        trace.returned_iteration = t;
        const double fit = (y - h.apply(u.modulate(detail::hard_decisions(den.mean, c)))).squaredNorm();
        if (fit < best_var) {
            best_var = fit;
            best_mean = den.mean;
            best_iter = t;
        }

        if (t == t_max) {
            rec.v_phi = state.v_phi(t - 1, t - 1);
            rec.micros = detail::elapsed_micros(started);
            trace.iterations.push_back(std::move(rec));
            break;
        }

        // orthogonalized denoiser output, back to the time domain; without an
        // extrinsic part the posterior mean itself is offered to the damping
        const double p_phi = den.variance / mf.v_gamma;
        const cvec x_cand = p_phi < 1.0 - 1e-12 ? u.modulate(cvec((den.mean - p_phi * r_sig) / (1.0 - p_phi)))
                                                : u.modulate(den.mean);
        const cvec res_cand = y - h.apply(x_cand);

        const std::size_t keep = std::min(window - 1, state.inputs.size());
        std::vector<cvec> cands;
        std::vector<const cvec*> cand_res;
        for (std::size_t k = state.inputs.size() - keep; k < state.inputs.size(); ++k) {
            cands.push_back(state.inputs[k]);
            cand_res.push_back(&state.residuals[k]);
        }
        cands.push_back(x_cand);
        cand_res.push_back(&res_cand);

        const auto d = static_cast<Eigen::Index>(cands.size());
        rmat v_cand(d, d);
        for (Eigen::Index a = 0; a < d; ++a) {
            for (Eigen::Index b = a; b < d; ++b) {
                v_cand(a, b) = v_cand(b, a) = state.residual_covariance(*cand_res[a], *cand_res[b]);
            }
        }
        DampedEstimate damped = damp(cands, v_cand, cfg.max_condition);
        cvec res_new = cvec::Zero(y.size());
        for (Eigen::Index k = 0; k < d; ++k) res_new += damped.weights.zeta[k] * *cand_res[k];

        const auto t_idx = static_cast<Eigen::Index>(t);
        rmat v_next = rmat::Zero(t_idx + 1, t_idx + 1);
        v_next.topLeftCorner(t_idx, t_idx) = state.v_phi;
        for (Eigen::Index i = 0; i < t_idx; ++i) {
            v_next(t_idx, i) = v_next(i, t_idx) = state.residual_covariance(res_new, state.residuals[static_cast<std::size_t>(i)]);
        }
        const double v_prev = state.v_phi(t_idx - 1, t_idx - 1);
        const double v_new = std::clamp(damped.weights.variance, min_denoiser_variance, v_prev);
        v_next(t_idx, t_idx) = v_new;

        state.inputs.push_back(std::move(damped.x));
        state.residuals.push_back(std::move(res_new));
        state.v_phi = std::move(v_next);

        rec.v_phi = v_new;
        rec.zeta.assign(damped.weights.zeta.data(), damped.weights.zeta.data() + d);
        rec.micros = detail::elapsed_micros(started);
        trace.iterations.push_back(std::move(rec));

        if (damped.weights.zeta[d - 1] != 0.0 && std::abs(v_prev - v_new) <= cfg.tol * v_prev) {
            trace.converged = true;
            // one more pass would only repeat the same estimate
            break;
        }
    }

    if (best_iter > 0) {
        result.posterior_mean = best_mean;
        trace.returned_iteration = best_iter;
    }
    result.decisions = detail::hard_decisions(result.posterior_mean, c);
    return result;
}

}  // namespace wfl
