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

#include "waveformlab/harness/trial.hpp"
#include "waveformlab/numerics/stats.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

namespace wfl {

struct BerRecord {
    SchemeKind scheme = SchemeKind::ifdm;
    DetectorKind detector = DetectorKind::cd_mamp;
    double snr_db = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t frames = 0;
    std::uint64_t failed_frames = 0;
    double ber = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 1.0;
    double mean_iterations = 0.0;
    double mean_detect_micros = 0.0;
};

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
inline void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    const auto body = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

struct SweepOptions {
    std::size_t workers = 1;
    std::size_t batch = 0;         // trials per parallel batch; 0 picks 8 per worker
    bool record_timing = true;     // false writes mean_detect_us = 0 for byte-stable output
    const std::atomic<bool>* cancel = nullptr;
    std::function<void(const BerRecord&)> on_record;
};

/// Trials run in index order batches; the point ends at the first trial index
/// whose cumulative error count reaches min_bit_errors (or at max_frames), so
/// the result does not depend on the worker count.
inline BerRecord run_point(const SimConfig& cfg, const Scheme& scheme, DetectorKind detector, double snr_db,
                           const SweepOptions& opt = {}) {
    BerRecord rec;
    rec.scheme = scheme.kind();
    rec.detector = detector;
    rec.snr_db = snr_db;
    const std::size_t batch = opt.batch ? opt.batch : 8 * std::max<std::size_t>(opt.workers, 1);
    std::uint64_t iter_sum = 0;
    double micros = 0.0;
    bool done = false;
    for (std::uint64_t start = 0; !done && start < cfg.stop.max_frames; start += batch) {
        if (opt.cancel && opt.cancel->load()) break;
        const auto count = static_cast<std::size_t>(std::min<std::uint64_t>(batch, cfg.stop.max_frames - start));
        std::vector<TrialResult> results(count);
        parallel_for(count, opt.workers, [&](std::size_t i) {
            results[i] = run_trial(cfg, scheme, detector, snr_db, start + i);
        });
        for (const auto& r : results) {
            rec.bits += r.bits;
            rec.bit_errors += r.bit_errors;
            rec.frames += 1;
            rec.failed_frames += r.error.empty() ? 0 : 1;
            iter_sum += static_cast<std::uint64_t>(r.iterations);
            micros += r.detect_micros;
            if (rec.bit_errors >= cfg.stop.min_bit_errors) {
                done = true;
                break;
            }
        }
    }
    if (rec.bits > 0) rec.ber = static_cast<double>(rec.bit_errors) / static_cast<double>(rec.bits);
    std::tie(rec.ci_lo, rec.ci_hi) = wilson_interval(rec.bit_errors, rec.bits);
    if (rec.frames > 0) {
        rec.mean_iterations = static_cast<double>(iter_sum) / static_cast<double>(rec.frames);
        rec.mean_detect_micros = opt.record_timing ? micros / static_cast<double>(rec.frames) : 0.0;
    }
    return rec;
}

/// Every (scheme, detector, snr) point of the configuration, in that nesting
/// order. Stops early, keeping finished points, when `cancel` is raised.
inline std::vector<BerRecord> sweep(const SimConfig& cfg, const SweepOptions& opt = {}) {
    validate(cfg);
    std::vector<BerRecord> out;
    for (auto kind : cfg.schemes) {
        const Scheme scheme(cfg.scheme_params(kind));
        for (auto det : cfg.detectors) {
            for (double snr : cfg.snr_db) {
                if (opt.cancel && opt.cancel->load()) return out;
                out.push_back(run_point(cfg, scheme, det, snr, opt));
                if (opt.on_record) opt.on_record(out.back());
            }
        }
    }
    return out;
}

inline constexpr const char* ber_csv_header =
    "scheme,detector,Nt,Nr,N,mod,velocity_kmh,snr_db,bits,errors,ber,ci_lo,ci_hi,frames,mean_iters,mean_detect_us";

inline std::string format_number(double v, int digits = 17) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

inline std::string ber_csv(const SimConfig& cfg, const std::vector<BerRecord>& records) {
    std::ostringstream os;
    os << ber_csv_header << '\n';
    for (const auto& r : records) {
        os << to_string(r.scheme) << ',' << to_string(r.detector) << ',' << cfg.nt << ',' << cfg.nr << ',' << cfg.n << ','
           << to_string(cfg.modulation) << ',' << format_number(cfg.channel.velocity_kmh) << ','
           << format_number(r.snr_db) << ',' << r.bits << ',' << r.bit_errors << ',' << format_number(r.ber, 10) << ','
           << format_number(r.ci_lo, 10) << ',' << format_number(r.ci_hi, 10) << ',' << r.frames << ','
           << format_number(r.mean_iterations, 6) << ',' << format_number(r.mean_detect_micros, 6) << '\n';
    }
    return os.str();
}

/// Write to a sibling temporary file, then rename over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os << content;
        os.flush();
        if (!os) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

/// FNV-1a over the canonical config dump; names the output files.
inline std::string config_hash(const SimConfig& cfg) {
    const std::string text = config_to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace wfl
