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

// Simulation configuration and its JSON form.
//
//   {
//     "scheme":    "ifdm" | ["ofdm", "otfs", "afdm", "ifdm"],       required
//     "detector":  "cd-mamp" | ["lmmse", "cd-oamp", "cd-mamp"],
//     "N": 64, "Nt": 1, "Nr": 1, "modulation": "qpsk",
//     "snr_db": [10, 12],
//     "channel":  {"paths", "tau_max_samples", "velocity_kmh", "carrier_hz",
//                  "subcarrier_spacing_hz", "profile", "decay_samples",
//                  "fractional_delays", "rolloff", "filter_span"},
//     "waveform": {"doppler_bins", "afdm_c1", "afdm_c2", "perm_seed",
//                  "regenerate_permutation"},
//     "iterations": {"max", "tol", "damping_window", "probes"},
//     "stop":     {"min_bit_errors", "max_frames"},
//     "seed": 1
//   }
//
// Unknown keys are rejected. Every key except "scheme" has a default.

#include "waveformlab/channel/paths.hpp"
#include "waveformlab/detectors/constellation.hpp"
#include "waveformlab/waveforms/scheme.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace wfl {

enum class DetectorKind { lmmse, cd_oamp, cd_mamp };

inline std::string_view to_string(DetectorKind d) {
    switch (d) {
        case DetectorKind::lmmse: return "lmmse";
        case DetectorKind::cd_oamp: return "cd-oamp";
        case DetectorKind::cd_mamp: return "cd-mamp";
    }
    return "?";
}

inline std::optional<DetectorKind> parse_detector(std::string_view s) {
    if (s == "lmmse") return DetectorKind::lmmse;
    if (s == "cd-oamp") return DetectorKind::cd_oamp;
    if (s == "cd-mamp") return DetectorKind::cd_mamp;
    return std::nullopt;
}

inline std::string_view to_string(DelayProfile p) { return p == DelayProfile::equal ? "equal" : "exponential"; }

/// Raised with the offending key path, e.g. "channel.paths".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct ChannelConfig {
    int paths = 6;
    double tau_max_samples = 5.0;
    double velocity_kmh = 300.0;
    double carrier_hz = 4e9;
    double subcarrier_spacing_hz = 15e3;
    DelayProfile profile = DelayProfile::equal;
    double decay_samples = 2.0;
    bool fractional_delays = false;
    double rolloff = 0.4;
    int filter_span = 4;

    bool operator==(const ChannelConfig&) const = default;
};

struct WaveformConfig {
    std::size_t doppler_bins = 16;      // L: OTFS grid is K x L, IFDM/AFDM spacing is delta_f / L
    std::optional<double> afdm_c1;      // default from the maximum Doppler
    std::optional<double> afdm_c2;
    std::uint64_t perm_seed = 1;
    bool regenerate_permutation = false;

    bool operator==(const WaveformConfig&) const = default;
};

struct IterationConfig {
    int max = 20;
    double tol = 1e-6;
    int damping_window = 3;
    int probes = 8;

    bool operator==(const IterationConfig&) const = default;
};

struct StopRule {
    std::uint64_t min_bit_errors = 200;
    std::uint64_t max_frames = 20000;

    bool operator==(const StopRule&) const = default;
};

struct SimConfig {
    std::vector<SchemeKind> schemes;
    std::vector<DetectorKind> detectors{DetectorKind::cd_mamp};
    std::size_t n = 64;
    std::size_t nt = 1;
    std::size_t nr = 1;
    Modulation modulation = Modulation::qpsk;
    std::vector<double> snr_db{10.0};
    ChannelConfig channel;
    WaveformConfig waveform;
    IterationConfig iterations;
    StopRule stop;
    std::uint64_t seed = 1;

    bool operator==(const SimConfig&) const = default;

    /// Equal bandwidth for all schemes: OTFS uses K = N / L subcarriers at
    /// delta_f, so one block of N samples spans L / delta_f.
    double sample_interval() const {
        return static_cast<double>(waveform.doppler_bins) / (static_cast<double>(n) * channel.subcarrier_spacing_hz);
    }
    double nu_max() const { return max_doppler(channel.velocity_kmh, channel.carrier_hz); }

    PulseShape pulse() const { return {channel.rolloff, channel.filter_span, sample_interval()}; }

    PathModel path_model() const {
        PathModel m;
        m.num_paths = channel.paths;
        m.tau_max_samples = channel.tau_max_samples;
        m.velocity_kmh = channel.velocity_kmh;
        m.carrier_hz = channel.carrier_hz;
        m.sample_interval = sample_interval();
        m.profile = channel.profile;
        m.decay_samples = channel.decay_samples;
        m.fractional_delays = channel.fractional_delays;
        return m;
    }

    /// Prefix long enough for every channel draw.
    std::size_t cp_len() const {
        if (!channel.fractional_delays) return static_cast<std::size_t>(std::floor(channel.tau_max_samples));
        return static_cast<std::size_t>(std::ceil(channel.tau_max_samples)) + static_cast<std::size_t>(channel.filter_span);
    }

    SchemeParams scheme_params(SchemeKind kind) const {
        SchemeParams p;
        p.kind = kind;
        p.n = n;
        p.perm_seed = waveform.perm_seed;
        if (kind == SchemeKind::otfs) {
            p.otfs_l = waveform.doppler_bins;
            p.otfs_k = n / waveform.doppler_bins;
        }
        if (kind == SchemeKind::afdm) {
            const auto [c1, c2] = afdm_default_chirps(n, nu_max(), sample_interval());
            p.c1 = waveform.afdm_c1.value_or(c1);
            p.c2 = waveform.afdm_c2.value_or(c2);
        }
        return p;
    }
};

/// Throws ConfigError naming the first invalid key.
inline void validate(const SimConfig& c) {
    if (c.schemes.empty()) throw ConfigError("scheme", "at least one scheme is required");
    if (c.detectors.empty()) throw ConfigError("detector", "at least one detector is required");
    if (c.n < 2) throw ConfigError("N", "must be at least 2");
    if (c.nt < 1) throw ConfigError("Nt", "must be at least 1");
    if (c.nr < 1) throw ConfigError("Nr", "must be at least 1");
    if (c.snr_db.empty()) throw ConfigError("snr_db", "SNR grid must not be empty");
    if (c.channel.paths < 1) throw ConfigError("channel.paths", "must be at least 1");
    if (c.channel.tau_max_samples < 0.0) throw ConfigError("channel.tau_max_samples", "must be nonnegative");
    if (c.cp_len() + 1 > c.n) throw ConfigError("channel.tau_max_samples", "channel memory exceeds the block length");
    if (c.channel.velocity_kmh < 0.0) throw ConfigError("channel.velocity_kmh", "must be nonnegative");
    if (c.channel.carrier_hz <= 0.0) throw ConfigError("channel.carrier_hz", "must be positive");
    if (c.channel.subcarrier_spacing_hz <= 0.0) throw ConfigError("channel.subcarrier_spacing_hz", "must be positive");
    if (c.channel.rolloff < 0.0 || c.channel.rolloff > 1.0) throw ConfigError("channel.rolloff", "must lie in [0, 1]");
    if (c.channel.filter_span < 1) throw ConfigError("channel.filter_span", "must be at least 1");
    if (c.channel.decay_samples <= 0.0) throw ConfigError("channel.decay_samples", "must be positive");
    if (c.waveform.doppler_bins < 1) throw ConfigError("waveform.doppler_bins", "must be at least 1");
    for (auto s : c.schemes) {
        if (s == SchemeKind::otfs && c.n % c.waveform.doppler_bins != 0) {
            throw ConfigError("waveform.doppler_bins", "OTFS needs N divisible by doppler_bins");
        }
    }
    if (c.iterations.max < 1) throw ConfigError("iterations.max", "must be at least 1");
    if (!(c.iterations.tol >= 0.0)) throw ConfigError("iterations.tol", "must be nonnegative");
    if (c.iterations.damping_window < 1) throw ConfigError("iterations.damping_window", "must be at least 1");
    if (c.iterations.probes < 1) throw ConfigError("iterations.probes", "must be at least 1");
    if (c.stop.max_frames < 1) throw ConfigError("stop.max_frames", "must be at least 1");
}

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
    if (!obj.is_object()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
    for (const auto& [k, _] : obj.items()) {
        if (!allowed.count(k)) throw ConfigError(prefix.empty() ? k : prefix + "." + k, "unknown key");
    }
}

template <class T>
void read_key(const nlohmann::json& obj, const char* key, T& out, const std::string& prefix) {
    if (!obj.contains(key)) return;
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    const auto& v = obj.at(key);
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
            if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
                throw ConfigError(path, "expected a nonnegative integer");
            }
        }
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(path, "expected a number");
    }
    out = v.get<T>();
}

template <class Enum, class Parse>
std::vector<Enum> read_names(const nlohmann::json& v, const std::string& key, Parse parse) {
    std::vector<Enum> out;
    const auto one = [&](const nlohmann::json& e) {
        if (!e.is_string()) throw ConfigError(key, "expected a string or an array of strings");
        auto parsed = parse(e.template get<std::string>());
        if (!parsed) throw ConfigError(key, "unknown value '" + e.template get<std::string>() + "'");
        out.push_back(*parsed);
    };
    if (v.is_array()) {
        for (const auto& e : v) one(e);
    } else {
        one(v);
    }
    return out;
}

}  // namespace detail

/// Parse and validate. Throws ConfigError.
inline SimConfig config_from_json(const nlohmann::json& j) {
    using detail::read_key;
    detail::reject_unknown(j, {"scheme", "detector", "N", "Nt", "Nr", "modulation", "snr_db", "channel", "waveform",
                               "iterations", "stop", "seed"},
                           "");
    SimConfig c;
    if (!j.contains("scheme")) throw ConfigError("scheme", "missing required key");
    c.schemes = detail::read_names<SchemeKind>(j.at("scheme"), "scheme", parse_scheme);
    if (j.contains("detector")) c.detectors = detail::read_names<DetectorKind>(j.at("detector"), "detector", parse_detector);
    read_key(j, "N", c.n, "");
    read_key(j, "Nt", c.nt, "");
    read_key(j, "Nr", c.nr, "");
    read_key(j, "seed", c.seed, "");
    if (j.contains("modulation")) {
        const auto& m = j.at("modulation");
        auto parsed = m.is_string() ? parse_modulation(m.get<std::string>()) : std::nullopt;
        if (!parsed) throw ConfigError("modulation", "expected one of bpsk, qpsk, 16qam");
        c.modulation = *parsed;
    }
    if (j.contains("snr_db")) {
        const auto& s = j.at("snr_db");
        c.snr_db.clear();
        if (s.is_number()) {
            c.snr_db.push_back(s.get<double>());
        } else if (s.is_array()) {
            for (const auto& e : s) {
                if (!e.is_number()) throw ConfigError("snr_db", "expected numbers");
                c.snr_db.push_back(e.get<double>());
            }
        } else {
            throw ConfigError("snr_db", "expected a number or an array of numbers");
        }
    }
    if (j.contains("channel")) {
        const auto& ch = j.at("channel");
        detail::reject_unknown(ch, {"paths", "tau_max_samples", "velocity_kmh", "carrier_hz", "subcarrier_spacing_hz",
                                    "profile", "decay_samples", "fractional_delays", "rolloff", "filter_span"},
                               "channel");
        read_key(ch, "paths", c.channel.paths, "channel");
        read_key(ch, "tau_max_samples", c.channel.tau_max_samples, "channel");
        read_key(ch, "velocity_kmh", c.channel.velocity_kmh, "channel");
        read_key(ch, "carrier_hz", c.channel.carrier_hz, "channel");
        read_key(ch, "subcarrier_spacing_hz", c.channel.subcarrier_spacing_hz, "channel");
        read_key(ch, "decay_samples", c.channel.decay_samples, "channel");
        read_key(ch, "fractional_delays", c.channel.fractional_delays, "channel");
        read_key(ch, "rolloff", c.channel.rolloff, "channel");
        read_key(ch, "filter_span", c.channel.filter_span, "channel");
        if (ch.contains("profile")) {
            const auto& p = ch.at("profile");
            if (p == "equal") {
                c.channel.profile = DelayProfile::equal;
            } else if (p == "exponential") {
                c.channel.profile = DelayProfile::exponential;
            } else {
                throw ConfigError("channel.profile", "expected 'equal' or 'exponential'");
            }
        }
    }
    if (j.contains("waveform")) {
        const auto& w = j.at("waveform");
        detail::reject_unknown(w, {"doppler_bins", "afdm_c1", "afdm_c2", "perm_seed", "regenerate_permutation"}, "waveform");
        read_key(w, "doppler_bins", c.waveform.doppler_bins, "waveform");
        read_key(w, "perm_seed", c.waveform.perm_seed, "waveform");
        read_key(w, "regenerate_permutation", c.waveform.regenerate_permutation, "waveform");
        for (const char* key : {"afdm_c1", "afdm_c2"}) {
            if (!w.contains(key) || w.at(key).is_null()) continue;
            if (!w.at(key).is_number()) throw ConfigError(std::string("waveform.") + key, "expected a number or null");
            (key[6] == '1' ? c.waveform.afdm_c1 : c.waveform.afdm_c2) = w.at(key).get<double>();
        }
    }
    if (j.contains("iterations")) {
        const auto& it = j.at("iterations");
        detail::reject_unknown(it, {"max", "tol", "damping_window", "probes"}, "iterations");
        read_key(it, "max", c.iterations.max, "iterations");
        read_key(it, "tol", c.iterations.tol, "iterations");
        read_key(it, "damping_window", c.iterations.damping_window, "iterations");
        read_key(it, "probes", c.iterations.probes, "iterations");
    }
    if (j.contains("stop")) {
        const auto& st = j.at("stop");
        detail::reject_unknown(st, {"min_bit_errors", "max_frames"}, "stop");
        read_key(st, "min_bit_errors", c.stop.min_bit_errors, "stop");
        read_key(st, "max_frames", c.stop.max_frames, "stop");
    }
    validate(c);
    return c;
}

/// Fully resolved form; config_from_json(config_to_json(c)) == c.
inline nlohmann::json config_to_json(const SimConfig& c) {
    nlohmann::json schemes = nlohmann::json::array();
    for (auto s : c.schemes) schemes.push_back(std::string(to_string(s)));
    nlohmann::json detectors = nlohmann::json::array();
    for (auto d : c.detectors) detectors.push_back(std::string(to_string(d)));
    const auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {
        {"scheme", schemes},
        {"detector", detectors},
        {"N", c.n},
        {"Nt", c.nt},
        {"Nr", c.nr},
        {"modulation", std::string(to_string(c.modulation))},
        {"snr_db", c.snr_db},
        {"channel",
         {{"paths", c.channel.paths},
          {"tau_max_samples", c.channel.tau_max_samples},
          {"velocity_kmh", c.channel.velocity_kmh},
          {"carrier_hz", c.channel.carrier_hz},
          {"subcarrier_spacing_hz", c.channel.subcarrier_spacing_hz},
          {"profile", std::string(to_string(c.channel.profile))},
          {"decay_samples", c.channel.decay_samples},
          {"fractional_delays", c.channel.fractional_delays},
          {"rolloff", c.channel.rolloff},
          {"filter_span", c.channel.filter_span}}},
        {"waveform",
         {{"doppler_bins", c.waveform.doppler_bins},
          {"afdm_c1", opt(c.waveform.afdm_c1)},
          {"afdm_c2", opt(c.waveform.afdm_c2)},
          {"perm_seed", c.waveform.perm_seed},
          {"regenerate_permutation", c.waveform.regenerate_permutation}}},
        {"iterations",
         {{"max", c.iterations.max},
          {"tol", c.iterations.tol},
          {"damping_window", c.iterations.damping_window},
          {"probes", c.iterations.probes}}},
        {"stop", {{"min_bit_errors", c.stop.min_bit_errors}, {"max_frames", c.stop.max_frames}}},
        {"seed", c.seed},
    };
}

/// Parse JSON text; syntax errors carry line and column.
inline SimConfig config_from_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    return config_from_json(j);
}

}  // namespace wfl
