// Copyright 2026 The Cheshire Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Command-line front end: presets, config resolution, and the shots.csv /
// summary.json writers.
//
// Config precedence: built-in defaults < --config file < flags. Unset
// couplings default to (preset ratio) * s, where the ratio is 10 for
// joint-strong and 1e-2 otherwise.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cheshire/montecarlo.hpp"
#include "cheshire/optics.hpp"
#include "cheshire/pointer.hpp"
#include "cheshire/postselect.hpp"
#include "cheshire/qstate.hpp"
#include "cheshire/result.hpp"

namespace cheshire::cli {

using Json = nlohmann::ordered_json;

inline const std::vector<std::string> &preset_names() {
    static const std::vector<std::string> names{"weak-cheshire", "which-path", "smile-only", "joint-strong",
                                                "sweep"};
    return names;
}

inline constexpr double kWeakRatio = 1e-2;
inline constexpr double kStrongRatio = 10.0;
inline constexpr double kSweepRatios[] = {1e-1, 1e-2, 1e-3};

struct ExperimentConfig {
    std::string preset = "weak-cheshire";
    double g_vertical = kWeakRatio;
    double g_horizontal = kWeakRatio;
    double s = 1.0;
    std::uint64_t shots = 100'000;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::string format = "csv+json";
};

inline Json config_to_json(const ExperimentConfig &c) {
    Json j;
    j["preset"] = c.preset;
    j["g_vertical"] = c.g_vertical;
    j["g_horizontal"] = c.g_horizontal;
    j["s"] = c.s;
    j["shots"] = c.shots;
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir;
    j["format"] = c.format;
    return j;
}

/// Values as given on the command line or in a config file, before validation.
struct RawConfig {
    std::optional<std::string> preset;
    std::optional<std::string> g_vertical;
    std::optional<std::string> g_horizontal;
    std::optional<std::string> s;
    std::optional<std::string> shots;
    std::optional<std::string> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    std::optional<std::string> config_file;
};

namespace detail {

inline Error usage(const std::string &key, const std::string &why) {
    return make_error(ErrorCode::InvalidArgument, "invalid value for " + key + ": " + why);
}

inline Result<double> parse_real(const std::string &key, const std::string &text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        return usage(key, "not a finite number ('" + text + "')");
    }
    return v;
}

inline Result<std::uint64_t> parse_count(const std::string &key, const std::string &text) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        return usage(key, "not a non-negative integer ('" + text + "')");
    }
    return v;
}

inline std::string shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

// Config files hold JSON; numbers are re-serialized so both sources share one validator.
inline Result<RawConfig> load_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        return usage("--config", "cannot open '" + path + "'");
    }
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error &e) {
        return usage("--config", std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) {
        return usage("--config", "top level must be an object");
    }
    RawConfig raw;
    for (const auto &[key, value] : j.items()) {
        std::optional<std::string> *slot = nullptr;
        bool numeric = true;
        if (key == "preset") {
            slot = &raw.preset;
            numeric = false;
        } else if (key == "g_vertical") {
            slot = &raw.g_vertical;
        } else if (key == "g_horizontal") {
            slot = &raw.g_horizontal;
        } else if (key == "s") {
            slot = &raw.s;
        } else if (key == "shots") {
            slot = &raw.shots;
        } else if (key == "seed") {
            slot = &raw.seed;
        } else if (key == "out_dir") {
            slot = &raw.out_dir;
            numeric = false;
        } else if (key == "format") {
            slot = &raw.format;
            numeric = false;
        } else {
            return usage(key, "unknown key in config file");
        }
        if (numeric) {
            if (value.is_number_unsigned() || value.is_number_integer()) {
                *slot = value.dump();
            } else if (value.is_number_float()) {
                *slot = shortest(value.get<double>());
            } else {
                return usage(key, "expected a number in config file");
            }
        } else {
            if (!value.is_string()) {
                return usage(key, "expected a string in config file");
            }
            *slot = value.get<std::string>();
        }
    }
    return raw;
}

inline void overlay(std::optional<std::string> &base, const std::optional<std::string> &top) {
    if (top) {
        base = top;
    }
}

}  // namespace detail

/// Validates raw values (flags already layered over the file) into a config.
inline Result<ExperimentConfig> resolve_config(const RawConfig &flags) {
    RawConfig raw;
    if (flags.config_file) {
        auto file = detail::load_config_file(*flags.config_file);
        if (!file) {
            return file.error();
        }
        raw = *file;
    }
    detail::overlay(raw.preset, flags.preset);
    detail::overlay(raw.g_vertical, flags.g_vertical);
    detail::overlay(raw.g_horizontal, flags.g_horizontal);
    detail::overlay(raw.s, flags.s);
    detail::overlay(raw.shots, flags.shots);
    detail::overlay(raw.seed, flags.seed);
    detail::overlay(raw.out_dir, flags.out_dir);
    detail::overlay(raw.format, flags.format);

    ExperimentConfig cfg;
    if (raw.preset) {
        const auto &names = preset_names();
        if (std::find(names.begin(), names.end(), *raw.preset) == names.end()) {
            return detail::usage("--preset", "unknown preset '" + *raw.preset + "'");
        }
        cfg.preset = *raw.preset;
    }
    if (raw.s) {
        auto v = detail::parse_real("--s", *raw.s);
        if (!v) {
            return v.error();
        }
        if (*v <= 0.0) {
            return detail::usage("--s", "must be > 0 (got " + *raw.s + ")");
        }
        cfg.s = *v;
    }
    const double ratio = cfg.preset == "joint-strong" ? kStrongRatio : kWeakRatio;
    cfg.g_vertical = ratio * cfg.s;
    cfg.g_horizontal = ratio * cfg.s;
    for (auto [key, text, slot] : {std::tuple{"--g-vertical", &raw.g_vertical, &cfg.g_vertical},
                                   std::tuple{"--g-horizontal", &raw.g_horizontal, &cfg.g_horizontal}}) {
        if (*text) {
            auto v = detail::parse_real(key, **text);
            if (!v) {
                return v.error();
            }
            if (*v < 0.0) {
                return detail::usage(key, "must be >= 0 (got " + **text + ")");
            }
            *slot = *v;
        }
    }
    if (raw.shots) {
        auto v = detail::parse_count("--shots", *raw.shots);
        if (!v) {
            return v.error();
        }
        if (*v == 0) {
            return detail::usage("--shots", "must be >= 1");
        }
        cfg.shots = *v;
    }
    if (raw.seed) {
        auto v = detail::parse_count("--seed", *raw.seed);
        if (!v) {
            return v.error();
        }
        cfg.seed = *v;
    }
    if (raw.out_dir) {
        if (raw.out_dir->empty()) {
            return detail::usage("--out-dir", "must not be empty");
        }
        cfg.out_dir = *raw.out_dir;
    }
    if (raw.format) {
        if (*raw.format != "csv+json") {
            return detail::usage("format", "only 'csv+json' is supported");
        }
        cfg.format = *raw.format;
    }
    return cfg;
}

inline void add_options(CLI::App &app, RawConfig &raw) {
    app.add_option("--preset", raw.preset, "weak-cheshire | which-path | smile-only | joint-strong | sweep");
    app.add_option("--g-vertical", raw.g_vertical, "vertical pointer displacement per unit eigenvalue");
    app.add_option("--g-horizontal", raw.g_horizontal, "horizontal pointer displacement per unit eigenvalue");
    app.add_option("--s", raw.s, "pointer width (standard deviation of the beam profile)");
    app.add_option("--shots", raw.shots, "photons per run");
    app.add_option("--seed", raw.seed, "RNG seed");
    app.add_option("--out-dir", raw.out_dir, "directory for shots.csv and summary.json");
    app.add_option("--config", raw.config_file, "JSON config file; flags override its values");
}

/// Parses argv (argv[0] is the program name). Usage errors come back as InvalidArgument.
inline Result<ExperimentConfig> parse_config(int argc, const char *const *argv) {
    CLI::App app{"cheshire"};
    RawConfig raw;
    add_options(app, raw);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return make_error(ErrorCode::InvalidArgument, e.what());
    }
    return resolve_config(raw);
}

inline Result<ExperimentConfig> parse_config(const std::vector<std::string> &args) {
    std::vector<const char *> argv{"cheshire"};
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    return parse_config(static_cast<int>(argv.size()), argv.data());
}

// ---------------------------------------------------------------------------
// Presets

inline Experiment make_experiment(const std::string &preset, double g_vertical, double g_horizontal,
                                  double s) {
    const Ket pre = canonical_states().pre;
    const Coupling cat{arm_observable(Arm::One), {s, g_vertical, Axis::Vertical}};
    const Coupling smile{arm_sigma_z_observable(Arm::Two), {s, g_horizontal, Axis::Horizontal}};
    if (preset == "which-path") {
        return {preset, pre, {cat}};
    }
    if (preset == "smile-only") {
        return {preset, pre, {smile}};
    }
    return {preset, pre, {cat, smile}};
}

inline Experiment make_experiment(const ExperimentConfig &c) {
    return make_experiment(c.preset == "sweep" ? "weak-cheshire" : c.preset, c.g_vertical, c.g_horizontal, c.s);
}

// ---------------------------------------------------------------------------
// Serialization

/// x is the vertical readout, y the horizontal one; both empty for D2/D3 shots.
inline void write_shots_csv(std::ostream &out, const std::vector<ShotRecord> &records,
                            const Experiment &experiment) {
    std::optional<std::size_t> xi, yi;
    for (std::size_t k = 0; k < experiment.couplings.size(); ++k) {
        (experiment.couplings[k].pointer.axis == Axis::Vertical ? xi : yi) = k;
    }
    out << "shot_id,detector,x,y\n";
    for (const auto &r : records) {
        out << r.shot_id << ',' << detector_name(r.detector) << ',';
        if (r.readout && xi) {
            out << detail::shortest((*r.readout)[*xi]);
        }
        out << ',';
        if (r.readout && yi) {
            out << detail::shortest((*r.readout)[*yi]);
        }
        out << '\n';
    }
}

inline Json complex_json(Complex z) {
    return Json{{"re", z.real()}, {"im", z.imag()}};
}

inline std::string eigen_key(double a) {
    return detail::shortest(a);
}

/// Analytic predictions for one experiment; never touches sampled data.
inline Result<Json> expected_json(const Experiment &experiment) {
    const Ket post = postselected_state(experiment.circuit);
    Json j;

    Json weak;
    for (const auto &[name, obs] : canonical_observables()) {
        auto wv = weak_value(obs, experiment.pre, post);
        if (!wv) {
            return wv.error();
        }
        weak[name] = complex_json(*wv);
    }
    j["weak_values"] = weak;

    Json abl;
    for (const auto &[name, obs] : canonical_observables()) {
        auto dist = abl_distribution(obs, experiment.pre, post);
        if (!dist) {
            return dist.error();
        }
        Json table;
        for (const auto &b : obs.branches) {
            table[eigen_key(b.eigenvalue)] = dist->probability({b.eigenvalue});
        }
        abl[name] = table;
    }
    std::vector<SpectralObservable> coupled;
    for (const auto &c : experiment.couplings) {
        coupled.push_back(c.observable);
    }
    if (!coupled.empty()) {
        auto joint = sequential_distribution(coupled, experiment.pre, post);
        if (!joint) {
            return joint.error();
        }
        Json rows = Json::array();
        for (const auto &[tuple, p] : joint->outcomes) {
            rows.push_back(Json{{"outcome", tuple}, {"probability", p}});
        }
        abl["coupled_sequence"] = rows;
    }
    j["abl"] = abl;

    auto prep = prepare(experiment);
    if (!prep) {
        return prep.error();
    }
    if (!prep->selected) {
        return make_error(ErrorCode::NullPostSelection, "post-selection probability is zero");
    }
    const auto &mixture = prep->selected->mixture;
    auto moments = mixture_moments(mixture);
    if (!moments) {
        return moments.error();
    }
    Json pointer;
    pointer["success_probability"] = prep->selected->success_probability;
    pointer["detector_probabilities"] = Json{{"D1", prep->p_d1}, {"D2", prep->p_d2}, {"D3", prep->p_d3}};
    Json axes;
    for (std::size_t k = 0; k < experiment.couplings.size(); ++k) {
        const auto &c = experiment.couplings[k];
        const auto &mom = (*moments)[k];
        Json a;
        a["observable"] = c.observable.name;
        a["coupling"] = c.pointer.coupling;
        a["mean"] = mom.mean;
        a["variance"] = mom.variance;
        a["mean_over_g"] = c.pointer.coupling > 0.0 ? Json(mom.mean / c.pointer.coupling) : Json(nullptr);
        if (c.pointer.coupling > 0.0) {
            std::vector<double> centres;
            for (const auto &b : c.observable.branches) {
                centres.push_back(b.eigenvalue * c.pointer.coupling);
            }
            auto masses = axis_lobe_masses(mixture, c.pointer.axis, centres);
            if (masses) {
                Json lobes;
                for (std::size_t b = 0; b < centres.size(); ++b) {
                    lobes[eigen_key(c.observable.branches[b].eigenvalue)] = (*masses)[b];
                }
                a["lobe_masses"] = lobes;
            }
        }
        axes[axis_name(c.pointer.axis)] = a;
    }
    pointer["axes"] = axes;
    j["pointer"] = pointer;
    return j;
}

inline Json estimated_json(const std::vector<ShotRecord> &records, const Experiment &experiment) {
    Json j;
    std::uint64_t counts[3] = {0, 0, 0};
    for (const auto &r : records) {
        ++counts[static_cast<int>(r.detector)];
    }
    j["n_shots"] = records.size();
    j["post_rate"] = records.empty() ? 0.0 : static_cast<double>(counts[0]) / static_cast<double>(records.size());
    j["detector_counts"] = Json{{"D1", counts[0]}, {"D2", counts[1]}, {"D3", counts[2]}};
    auto stats = estimate(records, experiment);
    if (!stats) {
        j["axes"] = nullptr;
        j["error"] = stats.error().describe();
        return j;
    }
    Json axes;
    for (const auto &a : stats->axes) {
        axes[axis_name(a.axis)] = Json{
            {"observable", a.observable},
            {"mean", a.mean},
            {"standard_error", a.standard_error},
            {"mean_over_g", a.mean_over_coupling ? Json(*a.mean_over_coupling) : Json(nullptr)},
        };
    }
    j["axes"] = axes;
    return j;
}

inline Json diagnostics_json(const Experiment &experiment) {
    Json j;
    Json ratios;
    for (const auto &c : experiment.couplings) {
        ratios[axis_name(c.pointer.axis)] = c.pointer.coupling / c.pointer.width;
    }
    j["g_over_s"] = ratios;
    auto prep = prepare(experiment);
    if (prep) {
        j["branch_count"] = prep->coupled.branches.size();
        j["nonzero_branch_count"] = prep->coupled.nonzero_branch_count();
    }
    j["rng"] = kRngAlgorithm;
    return j;
}

// ---------------------------------------------------------------------------
// Running

struct RunReport {
    int exit_code = 0;
    std::string diagnostic;
    Json summary;
};

namespace detail {

inline RunReport fail(int code, std::string why) {
    RunReport r;
    r.exit_code = code;
    r.diagnostic = std::move(why);
    return r;
}

}  // namespace detail

/// Runs the configured preset and writes shots.csv and summary.json into out_dir.
/// Exit codes: 0 success, 1 runtime failure.
inline RunReport run_preset(const ExperimentConfig &config) {
    struct Point {
        Experiment experiment;
        std::uint64_t first_id;
    };
    std::vector<Point> points;
    if (config.preset == "sweep") {
        std::uint64_t first = 0;
        for (double r : kSweepRatios) {
            points.push_back({make_experiment("weak-cheshire", r * config.s, r * config.s, config.s), first});
            first += config.shots;
        }
    } else {
        points.push_back({make_experiment(config), 0});
    }

    Json expected_points = Json::array();
    Json estimated_points = Json::array();
    Json diag_points = Json::array();
    std::vector<std::vector<ShotRecord>> all_records;
    for (const auto &p : points) {
        auto expected = expected_json(p.experiment);
        if (!expected) {
            return detail::fail(1, expected.error().describe());
        }
        auto prep = prepare(p.experiment);
        if (!prep) {
            return detail::fail(1, prep.error().describe());
        }
        auto records = sample_range(*prep, p.first_id, config.shots, config.seed);
        expected_points.push_back(*expected);
        estimated_points.push_back(estimated_json(records, p.experiment));
        Json d = diagnostics_json(p.experiment);
        d["shot_id_range"] = Json::array({p.first_id, p.first_id + config.shots});
        diag_points.push_back(d);
        all_records.push_back(std::move(records));
    }

    Json summary;
    Json cfg = config_to_json(config);
    if (config.preset == "sweep") {
        cfg["sweep_g_over_s"] = kSweepRatios;
    }
    summary["config"] = cfg;
    if (points.size() == 1) {
        summary["expected"] = expected_points[0];
        summary["estimated"] = estimated_points[0];
        summary["diagnostics"] = diag_points[0];
    } else {
        summary["expected"] = Json{{"points", expected_points}};
        summary["estimated"] = Json{{"points", estimated_points}};
        // Analytic weak-limit error |mean/g - 1| per axis and its shrink factor per decade.
        Json errors;
        for (const char *axis : {"vertical", "horizontal"}) {
            std::vector<double> errs;
            for (const auto &e : expected_points) {
                errs.push_back(std::abs(e["pointer"]["axes"][axis]["mean_over_g"].get<double>() - 1.0));
            }
            Json ratios = Json::array();
            for (std::size_t k = 0; k + 1 < errs.size(); ++k) {
                ratios.push_back(errs[k] / errs[k + 1]);
            }
            errors[axis] = Json{{"weak_limit_error", errs}, {"error_ratio_per_decade", ratios}};
        }
        summary["diagnostics"] = Json{{"points", diag_points}, {"weak_limit", errors}};
    }

    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) {
        return detail::fail(1, "cannot create output directory '" + config.out_dir + "': " + ec.message());
    }
    const auto dir = std::filesystem::path(config.out_dir);
    {
        std::ofstream csv(dir / "shots.csv", std::ios::binary);
        if (!csv) {
            return detail::fail(1, "cannot write " + (dir / "shots.csv").string());
        }
        for (std::size_t k = 0; k < points.size(); ++k) {
            std::ostringstream part;
            write_shots_csv(part, all_records[k], points[k].experiment);
            std::string text = part.str();
            if (k > 0) {
                text.erase(0, text.find('\n') + 1);  // header once
            }
            csv << text;
        }
        if (!csv) {
            return detail::fail(1, "I/O error writing shots.csv");
        }
    }
    {
        std::ofstream js(dir / "summary.json", std::ios::binary);
        if (!js) {
            return detail::fail(1, "cannot write " + (dir / "summary.json").string());
        }
        js << summary.dump(2) << '\n';
        if (!js) {
            return detail::fail(1, "I/O error writing summary.json");
        }
    }
    RunReport ok;
    ok.summary = std::move(summary);
    return ok;
}

/// Full command-line entry point. Exit codes: 0 success, 1 runtime failure, 2 usage error.
inline int run_cli(int argc, const char *const *argv, std::ostream &out = std::cout,
                   std::ostream &err = std::cerr) {
    CLI::App app{"Quantum Cheshire cat simulator: pre/post-selected photon, weak and strong pointers."};
    RawConfig raw;
    add_options(app, raw);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    auto config = resolve_config(raw);
    if (!config) {
        err << "error: " << config.error().message << '\n';
        return 2;
    }
    auto report = run_preset(*config);
    if (report.exit_code != 0) {
        err << "error: " << report.diagnostic << '\n';
        return report.exit_code;
    }
    const auto &est = report.summary["estimated"];
    out << "preset " << config->preset << ": " << config->shots << " shots, seed " << config->seed
        << " -> " << config->out_dir << "/shots.csv, summary.json\n";
    if (est.contains("post_rate")) {
        out << "post_rate " << est["post_rate"].get<double>() << '\n';
    }
    return 0;
}

}  // namespace cheshire::cli
