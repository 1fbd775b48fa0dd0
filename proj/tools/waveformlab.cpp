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
//
// Command-line front end: sweep, compare, qq and oracle subcommands.
//
// Exit codes: 0 success, 1 oracle failure, 2 configuration error,
// 3 runtime failure, 130 interrupted (partial results written).

#include "waveformlab/waveformlab.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace {

constexpr int exit_oracle_failed = 1;
constexpr int exit_config = 2;
constexpr int exit_runtime = 3;
constexpr int exit_interrupted = 130;

std::atomic<bool> g_cancel{false};

extern "C" void on_sigint(int) { g_cancel.store(true); }

struct CliError {
    int code;
    std::string message;
};

std::size_t default_workers() {
    if (const char* env = std::getenv("WAVEFORMLAB_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
        std::cerr << "warning: ignoring WAVEFORMLAB_WORKERS='" << env << "'\n";
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

wfl::SimConfig load_config(const std::string& path, const std::optional<std::uint64_t>& seed) {
    std::ifstream in(path);
    if (!in) throw CliError{exit_config, "config error: cannot read '" + path + "'"};
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        wfl::SimConfig cfg = wfl::config_from_text(ss.str());
        if (seed) cfg.seed = *seed;
        return cfg;
    } catch (const wfl::ConfigError& e) {
        throw CliError{exit_config, std::string("config error: ") + e.what()};
    }
}

nlohmann::json manifest(const wfl::SimConfig& cfg, const std::string& config_path, const fs::path& out_dir,
                        const std::string& started) {
    return {{"config_hash", wfl::config_hash(cfg)},
            {"config_path", config_path},
            {"version", wfl::version},
            {"version_id", wfl::version_id},
            {"out_dir", out_dir.string()},
            {"started_utc", started},
            {"finished_utc", utc_now()}};
}

struct SweepArgs {
    std::string config;
    std::string out = "results";
    std::size_t workers = 1;
    std::optional<std::uint64_t> seed;
    bool dry_run = false;
    bool no_timing = false;
};

int cmd_sweep(const SweepArgs& a) {
    const wfl::SimConfig cfg = load_config(a.config, a.seed);
    const std::string hash = wfl::config_hash(cfg);
    const fs::path out_dir(a.out);
    const fs::path csv_path = out_dir / ("sweep_" + hash + ".csv");
    const fs::path json_path = out_dir / ("sweep_" + hash + ".json");

    if (a.dry_run) {
        const std::size_t points = cfg.schemes.size() * cfg.detectors.size() * cfg.snr_db.size();
        const auto bits_per_frame = cfg.nt * cfg.n * wfl::Constellation::make(cfg.modulation).bits_per_symbol();
        std::cout << wfl::config_to_json(cfg).dump(2) << '\n'
                  << "points: " << points << '\n'
                  << "frames per point: until " << cfg.stop.min_bit_errors << " bit errors, at most "
                  << cfg.stop.max_frames << '\n'
                  << "trials: at most " << points * cfg.stop.max_frames << " (" << bits_per_frame << " bits each)\n"
                  << "would write: " << csv_path.string() << ", " << json_path.string() << '\n';
        return 0;
    }

    const std::string started = utc_now();
    std::vector<wfl::BerRecord> records;
    try {
        fs::create_directories(out_dir);
        wfl::SweepOptions opt;
        opt.workers = a.workers;
        opt.record_timing = !a.no_timing;
        opt.cancel = &g_cancel;
        opt.on_record = [](const wfl::BerRecord& r) {
            std::cerr << wfl::to_string(r.scheme) << ' ' << wfl::to_string(r.detector) << " snr=" << r.snr_db
                      << " ber=" << r.ber << " errors=" << r.bit_errors << " frames=" << r.frames << '\n';
        };
        std::signal(SIGINT, on_sigint);
        records = wfl::sweep(cfg, opt);
        std::signal(SIGINT, SIG_DFL);
    } catch (const wfl::ConfigError& e) {
        throw CliError{exit_config, std::string("config error: ") + e.what()};
    } catch (const std::exception& e) {
        throw CliError{exit_runtime, std::string("runtime error: ") + e.what()};
    }

    // an interrupted point is dropped whole; finished points are kept
    const bool interrupted = g_cancel.load();
    if (interrupted && !records.empty()) {
        const auto& last = records.back();
        if (last.bit_errors < cfg.stop.min_bit_errors && last.frames < cfg.stop.max_frames) records.pop_back();
    }
    try {
        nlohmann::json side{{"manifest", manifest(cfg, a.config, out_dir, started)},
                            {"config", wfl::config_to_json(cfg)},
                            {"interrupted", interrupted},
                            {"points_written", records.size()}};
        side["manifest"]["workers"] = a.workers;
        side["manifest"]["csv"] = csv_path.filename().string();
        wfl::write_file_atomic(csv_path, wfl::ber_csv(cfg, records));
        wfl::write_file_atomic(json_path, side.dump(2) + "\n");
    } catch (const std::exception& e) {
        throw CliError{exit_runtime, std::string("runtime error: ") + e.what()};
    }
    std::cout << csv_path.string() << '\n';
    if (interrupted) {
        std::cerr << "interrupted: wrote " << records.size() << " finished points\n";
        return exit_interrupted;
    }
    return 0;
}

int cmd_compare(const std::vector<std::string>& files, double at_ber) {
    std::vector<wfl::BerCurve> curves;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw CliError{exit_runtime, "runtime error: cannot read '" + f + "'"};
        try {
            auto c = wfl::read_ber_csv(in, files.size() > 1 ? fs::path(f).filename().string() : "");
            curves.insert(curves.end(), c.begin(), c.end());
        } catch (const std::exception& e) {
            throw CliError{exit_runtime, "runtime error: " + f + ": " + e.what()};
        }
    }
    const wfl::Comparison cmp = wfl::compare_curves(curves, at_ber);
    for (const auto& w : cmp.warnings) std::cerr << "warning: " << w << '\n';
    char buf[512];
    std::snprintf(buf, sizeof buf, "snr_db at ber %.3g\n", at_ber);
    std::cout << buf;
    for (const auto& [label, snr] : cmp.snr) {
        if (snr) {
            std::snprintf(buf, sizeof buf, "  %-48s %8.2f\n", label.c_str(), *snr);
        } else {
            std::snprintf(buf, sizeof buf, "  %-48s %8s\n", label.c_str(), "n/a");
        }
        std::cout << buf;
    }
    if (!cmp.gaps.empty()) std::cout << "gaps (dB, second minus first)\n";
    for (const auto& g : cmp.gaps) {
        std::snprintf(buf, sizeof buf, "  %s vs %s: %+.2f\n", g.a.c_str(), g.b.c_str(), g.gap_db);
        std::cout << buf;
    }
    return 0;
}

struct QqArgs {
    std::string config;
    std::string out = "results";
    std::size_t trials = 20;
    std::optional<double> snr;
    std::optional<std::uint64_t> seed;
};

int cmd_qq(const QqArgs& a) {
    const wfl::SimConfig cfg = load_config(a.config, a.seed);
    const double snr = a.snr.value_or(cfg.snr_db.front());
    const fs::path out_dir(a.out);
    const fs::path path = out_dir / ("qq_" + wfl::config_hash(cfg) + ".tsv");
    try {
        const auto rep = wfl::gaussianity_probe(cfg, snr, a.trials);
        std::ostringstream os;
        wfl::write_qq_tsv(os, wfl::qq_table(rep.pre_samples, rep.post_samples));
        fs::create_directories(out_dir);
        wfl::write_file_atomic(path, os.str());
        std::cerr << "ks_pre=" << rep.ks_pre << " ks_post=" << rep.ks_post << '\n';
    } catch (const wfl::ConfigError& e) {
        throw CliError{exit_config, std::string("config error: ") + e.what()};
    } catch (const std::exception& e) {
        throw CliError{exit_runtime, std::string("runtime error: ") + e.what()};
    }
    std::cout << path.string() << '\n';
    return 0;
}

int cmd_oracle(const std::string& suite, const std::string& report_path) {
    std::vector<std::string> names;
    if (suite == "all") {
        names = wfl::oracle_suites();
    } else {
        names.push_back(suite);
    }
    nlohmann::json reports = nlohmann::json::array();
    bool ok = true;
    try {
        for (const auto& name : names) {
            const wfl::OracleReport rep = wfl::run_oracle_suite(name);
            ok = ok && rep.passed();
            for (const auto& c : rep.checks) {
                if (!c.passed) std::cerr << "FAIL " << rep.suite << ": " << c.name << " (value " << c.value << ", tolerance " << c.tolerance << ")\n";
            }
            reports.push_back(wfl::to_json(rep));
        }
    } catch (const std::exception& e) {
        throw CliError{exit_runtime, std::string("runtime error: ") + e.what()};
    }
    const nlohmann::json doc = names.size() == 1 ? reports.front() : nlohmann::json{{"passed", ok}, {"suites", reports}};
    if (!report_path.empty()) {
        try {
            wfl::write_file_atomic(report_path, doc.dump(2) + "\n");
        } catch (const std::exception& e) {
            throw CliError{exit_runtime, std::string("runtime error: ") + e.what()};
        }
    }
    std::cout << doc.dump(2) << '\n';
    return ok ? 0 : exit_oracle_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"waveformlab: multicarrier waveform and iterative detector simulation"};
    app.set_version_flag("--version", std::string(wfl::version) + " (" + wfl::version_id + ")");
    app.require_subcommand(1);

    SweepArgs sweep_args;
    sweep_args.workers = default_workers();
    auto* sweep = app.add_subcommand("sweep", "run a BER sweep and write CSV plus JSON sidecar");
    sweep->add_option("--config", sweep_args.config, "config file (JSON)")->required();
    sweep->add_option("--out", sweep_args.out, "output directory")->capture_default_str();
    sweep->add_option("--workers", sweep_args.workers, "parallel workers (default WAVEFORMLAB_WORKERS)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--seed", sweep_args.seed, "override the config base seed");
    sweep->add_flag("--dry-run", sweep_args.dry_run, "print the resolved config and trial budget only");
    sweep->add_flag("--no-timing", sweep_args.no_timing, "write mean_detect_us as 0 for byte-stable output");

    std::vector<std::string> compare_files;
    double at_ber = 1e-3;
    auto* compare = app.add_subcommand("compare", "SNR at a target BER per curve, with pairwise gaps");
    compare->add_option("files", compare_files, "result CSV files")->required();
    compare->add_option("--at-ber", at_ber, "target BER")->check(CLI::PositiveNumber)->capture_default_str();

    QqArgs qq_args;
    auto* qq = app.add_subcommand("qq", "quantile data of linear-step errors before and after the inverse transform");
    qq->add_option("--config", qq_args.config, "config file (JSON)")->required();
    qq->add_option("--out", qq_args.out, "output directory")->capture_default_str();
    qq->add_option("--trials", qq_args.trials, "frames pooled")->check(CLI::PositiveNumber)->capture_default_str();
    qq->add_option("--snr", qq_args.snr, "SNR in dB (default: first grid point)");
    qq->add_option("--seed", qq_args.seed, "override the config base seed");

    std::string suite = "all";
    std::string report_path;
    auto* oracle = app.add_subcommand("oracle", "run oracle suites and print a JSON report");
    oracle->add_option("--suite", suite, "suite to run")
        ->check(CLI::IsMember({"small", "mamp", "channel", "all"}))
        ->capture_default_str();
    oracle->add_option("--report", report_path, "also write the report to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*sweep) return cmd_sweep(sweep_args);
        if (*compare) return cmd_compare(compare_files, at_ber);
        if (*qq) return cmd_qq(qq_args);
        if (*oracle) return cmd_oracle(suite, report_path);
    } catch (const CliError& e) {
        std::cerr << e.message << '\n';
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return exit_runtime;
    }
    return 0;
}
