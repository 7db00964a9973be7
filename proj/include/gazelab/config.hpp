#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazelab/detector.hpp"
#include "gazelab/error.hpp"
#include "gazelab/foveation.hpp"
#include "gazelab/inference.hpp"
#include "gazelab/sim.hpp"
#include "gazelab/trace.hpp"

namespace gazelab {

using Json = nlohmann::json;

/// Everything one platform profile pins down: metric direction, sweep
/// timing, map geometry, conditioning, cost model, and which offset
/// family calibration fits.
struct Profile {
    std::string name;
    MetricPolarity polarity = MetricPolarity::LoadIncreasesMetric;
    ScanSchedule schedule;
    FoveationConfig foveation;
    SmoothingConfig smoothing;
    CostModel cost;
    HcoConfig hco;
    DetectorConfig detector;
    std::string offset_family; // constant | linear | tangent
    double fps = 120.0;
};

/// The three built-in profiles.
///  - desktop: frame-rate metric, 0.2 s sweeps, 107.52x75 FOV, short SG
///    window with outlier filtering and neighbor averaging, constant
///    offsets fit per FPS target.
///  - vr-mqp: frame-time metric, 0.5 s sweeps, 108x96 FOV, SG(27,2),
///    angle-linear offsets.
///  - vr-varjo: rate-like metric (inverse render time), 0.5 s sweeps,
///    120x105 FOV, SG(27,2), tangent offsets; the longer pipeline latency
///    puts the raw bias in the tangent calibrator's C range.
inline Profile make_profile(const std::string& name) {
    Profile p;
    p.name = name;
    if (name == "desktop") {
        p.polarity = MetricPolarity::LoadDecreasesMetric;
        p.schedule = ScanSchedule{0.2, 107.52, 75.0, 0.0};
        // Desktop conditioning is outlier replacement plus neighbor
        // averaging; the SG pass is parked at the identity (window 1).
        // The MAD band guards against counter glitches far outside the
        // noise floor; it must sit above the probe's own dip, which a
        // handful of frames per scan carry, or the filter erases the
        // signal it is meant to protect.
        p.smoothing = SmoothingConfig{1, 0, 4, true, 25.0};
        p.offset_family = "constant";
        p.fps = 120.0;
        p.cost.latency_frames = 2;
    } else if (name == "vr-mqp") {
        p.polarity = MetricPolarity::LoadIncreasesMetric;
        p.schedule = ScanSchedule{0.5, 108.0, 96.0, 0.0};
        p.smoothing = SmoothingConfig{27, 2, 0, false, 3.0};
        p.offset_family = "linear";
        p.fps = 72.0;
        p.cost.latency_frames = 2;
    } else if (name == "vr-varjo") {
        p.polarity = MetricPolarity::LoadDecreasesMetric;
        p.schedule = ScanSchedule{0.5, 120.0, 105.0, 0.0};
        p.smoothing = SmoothingConfig{27, 2, 0, false, 3.0};
        p.offset_family = "tangent";
        p.fps = 60.0;
        p.cost.latency_frames = 5;
    } else {
        throw Error(ErrorCode::ConfigError, "unknown profile: " + name);
    }
    p.foveation.fov_x_deg = p.schedule.fov_x_deg;
    p.foveation.fov_y_deg = p.schedule.fov_y_deg;
    p.cost.base_frame_time_ms = 1000.0 / p.fps;
    p.cost.sigma_ms = 0.12;
    p.cost.rho = 0.3;
    return p;
}

/// How the simulated user looks around.
struct GazeSpec {
    enum class Kind { Fixed, Walk, TracePath } kind = Kind::Fixed;
    double fixed_x_deg = 0.0;
    double fixed_y_deg = 0.0;
    double walk_min_fix_s = 0.4;
    double walk_max_fix_s = 1.2;
    double walk_margin = 0.7;
    std::string trace_path;
};

/// One cell of the sweep grid.
struct SweepPoint {
    double fps = 120.0;
    double foveation_strength = 1.0;
    double foveal_diameter = 21.0;
    double t_scan_s = 0.2;
    bool attack = true;
};

struct DetectSettings {
    double window_len_s = 1.0;
    double outlier_threshold = 0.02;
    std::string mode = "kmeans";    // kmeans | logistic
    std::string features = "two";   // two | all
    std::vector<double> study_lengths;
    double weight_pos = 1.0;
    double weight_neg = 1.0;
};

struct ExperimentConfig {
    Profile profile;
    double duration_s = 30.0;
    std::vector<std::uint64_t> seeds{1};
    std::vector<SweepPoint> sweep;
    GazeSpec gaze;
    DetectSettings detect;
    LinearGrid linear_grid;
    TangentGrid tangent_grid;
    bool loocv = false;
};

namespace detail {

inline GridRange parse_grid_range(const Json& j, const GridRange& fallback) {
    if (j.is_null()) return fallback;
    if (!j.is_array() || j.size() != 3) {
        throw Error(ErrorCode::ConfigError, "grid ranges are [min, max, step]");
    }
    GridRange r{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    try {
        r.count();
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, std::string("grid range: ") + e.what());
    }
    return r;
}

template <typename T>
inline std::vector<T> parse_list(const Json& j, std::vector<T> fallback, const char* what) {
    if (j.is_null()) return fallback;
    if (!j.is_array() || j.empty()) {
        throw Error(ErrorCode::ConfigError, std::string(what) + " must be a nonempty array");
    }
    std::vector<T> out;
    for (const auto& v : j) out.push_back(v.get<T>());
    return out;
}

} // namespace detail

/// Parses the experiment config. The profile sets every default; the
/// optional `overrides` object reaches into the numeric knobs. Errors are
/// all reported as ConfigError so the CLI can map them to usage exits.
inline ExperimentConfig parse_config(const Json& j,
                                     const std::optional<std::string>& profile_override,
                                     const std::optional<std::uint64_t>& seed_override) {
    ExperimentConfig cfg;
    try {
        std::string profile_name = j.value("profile", std::string("desktop"));
        if (profile_override) profile_name = *profile_override;
        cfg.profile = make_profile(profile_name);

        cfg.duration_s = j.value("duration_s", 30.0);
        if (cfg.duration_s <= 0.0) {
            throw Error(ErrorCode::ConfigError, "duration_s must be positive");
        }
        cfg.seeds = detail::parse_list<std::uint64_t>(j.contains("seeds") ? j["seeds"] : Json(),
                                                      {1}, "seeds");
        if (seed_override) cfg.seeds = {*seed_override};

        const Json sweep = j.value("sweep", Json::object());
        const auto fps = detail::parse_list<double>(
            sweep.contains("fps") ? sweep["fps"] : Json(), {cfg.profile.fps}, "sweep.fps");
        const auto strength = detail::parse_list<double>(
            sweep.contains("foveation_strength") ? sweep["foveation_strength"] : Json(), {1.0},
            "sweep.foveation_strength");
        const auto diameter = detail::parse_list<double>(
            sweep.contains("foveal_diameter") ? sweep["foveal_diameter"] : Json(),
            {cfg.profile.foveation.foveal_diameter_cells}, "sweep.foveal_diameter");
        const auto t_scan = detail::parse_list<double>(
            sweep.contains("t_scan_s") ? sweep["t_scan_s"] : Json(),
            {cfg.profile.schedule.t_scan_s}, "sweep.t_scan_s");
        const auto attack = detail::parse_list<bool>(
            sweep.contains("attack") ? sweep["attack"] : Json(), {true}, "sweep.attack");
        for (double f : fps) {
            for (double s : strength) {
                for (double d : diameter) {
                    for (double t : t_scan) {
                        for (bool a : attack) {
                            if (f <= 0 || s < 0 || d <= 0 || t <= 0) {
                                throw Error(ErrorCode::ConfigError,
                                            "sweep values must be positive");
                            }
                            cfg.sweep.push_back(SweepPoint{f, s, d, t, a});
                        }
                    }
                }
            }
        }

        if (j.contains("gaze")) {
            const Json& g = j["gaze"];
            if (g.contains("fixed")) {
                cfg.gaze.kind = GazeSpec::Kind::Fixed;
                cfg.gaze.fixed_x_deg = g["fixed"].at(0).get<double>();
                cfg.gaze.fixed_y_deg = g["fixed"].at(1).get<double>();
            } else if (g.contains("walk")) {
                cfg.gaze.kind = GazeSpec::Kind::Walk;
                const Json& w = g["walk"];
                cfg.gaze.walk_min_fix_s = w.value("min_fix_s", 0.4);
                cfg.gaze.walk_max_fix_s = w.value("max_fix_s", 1.2);
                cfg.gaze.walk_margin = w.value("margin", 0.7);
            } else if (g.contains("trace_path")) {
                cfg.gaze.kind = GazeSpec::Kind::TracePath;
                cfg.gaze.trace_path = g["trace_path"].get<std::string>();
            } else {
                throw Error(ErrorCode::ConfigError,
                            "gaze must contain one of: fixed, walk, trace_path");
            }
        }

        if (j.contains("overrides")) {
            const Json& o = j["overrides"];
            Profile& p = cfg.profile;
            p.cost.sigma_ms = o.value("sigma_ms", p.cost.sigma_ms);
            p.cost.rho = o.value("rho", p.cost.rho);
            p.cost.latency_frames = o.value("latency_frames", p.cost.latency_frames);
            p.cost.k_fovea_ms = o.value("k_fovea_ms", p.cost.k_fovea_ms);
            p.cost.k_peri_ms = o.value("k_peri_ms", p.cost.k_peri_ms);
            p.hco.cost_weight = o.value("cost_weight", p.hco.cost_weight);
            p.hco.width_x_deg = o.value("hco_width_x_deg", p.hco.width_x_deg);
            p.hco.height_y_deg = o.value("hco_height_y_deg", p.hco.height_y_deg);
            p.schedule.idle_gap_s = o.value("idle_gap_s", p.schedule.idle_gap_s);
            p.smoothing.sg_window = o.value("sg_window", p.smoothing.sg_window);
            p.smoothing.sg_order = o.value("sg_order", p.smoothing.sg_order);
            p.smoothing.neighbor_avg = o.value("neighbor_avg", p.smoothing.neighbor_avg);
            p.smoothing.outlier_filter = o.value("outlier_filter", p.smoothing.outlier_filter);
            p.smoothing.mad_threshold = o.value("mad_threshold", p.smoothing.mad_threshold);
            p.offset_family = o.value("offset_family", p.offset_family);
            if (p.cost.latency_frames < 0 || p.cost.sigma_ms < 0 || p.cost.rho < 0 ||
                p.cost.rho >= 1) {
                throw Error(ErrorCode::ConfigError,
                            "overrides: need latency >= 0, sigma >= 0, 0 <= rho < 1");
            }
        }

        if (j.contains("detect")) {
            const Json& d = j["detect"];
            cfg.detect.window_len_s = d.value("window_len_s", cfg.detect.window_len_s);
            cfg.detect.outlier_threshold =
                d.value("outlier_threshold", cfg.detect.outlier_threshold);
            cfg.detect.mode = d.value("mode", cfg.detect.mode);
            cfg.detect.features = d.value("features", cfg.detect.features);
            cfg.detect.study_lengths = detail::parse_list<double>(
                d.contains("study_lengths") ? d["study_lengths"] : Json(), {},
                "detect.study_lengths");
            cfg.detect.weight_pos = d.value("weight_pos", 1.0);
            cfg.detect.weight_neg = d.value("weight_neg", 1.0);
            if (cfg.detect.window_len_s <= 0 || cfg.detect.outlier_threshold <= 0) {
                throw Error(ErrorCode::ConfigError,
                            "detect: window_len_s and outlier_threshold must be positive");
            }
            if (cfg.detect.mode != "kmeans" && cfg.detect.mode != "logistic") {
                throw Error(ErrorCode::ConfigError, "detect.mode must be kmeans or logistic");
            }
            if (cfg.detect.features != "two" && cfg.detect.features != "all") {
                throw Error(ErrorCode::ConfigError, "detect.features must be two or all");
            }
        }

        if (j.contains("grids")) {
            const Json& g = j["grids"];
            if (g.contains("linear")) {
                cfg.linear_grid.a = detail::parse_grid_range(
                    g["linear"].contains("a") ? g["linear"]["a"] : Json(), cfg.linear_grid.a);
                cfg.linear_grid.b = detail::parse_grid_range(
                    g["linear"].contains("b") ? g["linear"]["b"] : Json(), cfg.linear_grid.b);
            }
            if (g.contains("tangent")) {
                const Json& t = g["tangent"];
                cfg.tangent_grid.c = detail::parse_grid_range(
                    t.contains("c") ? t["c"] : Json(), cfg.tangent_grid.c);
                cfg.tangent_grid.a = detail::parse_grid_range(
                    t.contains("a") ? t["a"] : Json(), cfg.tangent_grid.a);
                cfg.tangent_grid.k = detail::parse_grid_range(
                    t.contains("k") ? t["k"] : Json(), cfg.tangent_grid.k);
            }
        }
        cfg.loocv = j.value("loocv", false);
    } catch (const Error&) {
        throw;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("config: ") + e.what());
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path,
                                    const std::optional<std::string>& profile_override,
                                    const std::optional<std::uint64_t>& seed_override) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("config parse: ") + e.what());
    }
    return parse_config(j, profile_override, seed_override);
}

/// Specializes the profile to one sweep point: FPS sets the base frame
/// time, strength pulls k_fovea toward k_peri (1 = full contrast, 0 =
/// foveation off), and the probe is parked for non-attack runs.
inline Profile resolve_point(const Profile& base, const SweepPoint& pt, std::uint64_t seed) {
    Profile p = base;
    p.fps = pt.fps;
    p.cost.base_frame_time_ms = 1000.0 / pt.fps;
    p.cost.k_fovea_ms =
        p.cost.k_peri_ms + pt.foveation_strength * (p.cost.k_fovea_ms - p.cost.k_peri_ms);
    p.foveation.foveal_diameter_cells = pt.foveal_diameter;
    p.schedule.t_scan_s = pt.t_scan_s;
    p.hco.active = pt.attack;
    p.cost.seed = seed;
    return p;
}

/// The gaze trace for one run. Walk traces decorrelate from the metric
/// noise by folding a constant into the seed.
inline std::vector<GazePoint> resolve_gaze(const GazeSpec& spec, double duration_s,
                                           const Profile& profile, std::uint64_t seed) {
    switch (spec.kind) {
    case GazeSpec::Kind::Fixed:
        return make_fixed_trace(spec.fixed_x_deg, spec.fixed_y_deg, duration_s);
    case GazeSpec::Kind::Walk:
        return make_walk_trace(seed ^ 0xa5a5a5a5a5a5a5a5ull, duration_s,
                               profile.schedule.fov_x_deg, profile.schedule.fov_y_deg,
                               spec.walk_min_fix_s, spec.walk_max_fix_s, spec.walk_margin);
    case GazeSpec::Kind::TracePath: {
        std::ifstream probe(spec.trace_path, std::ios::binary);
        if (!probe) {
            // Config pointed at a nonexistent file: a usage error, not a
            // computation failure.
            throw Error(ErrorCode::ConfigError, "gaze trace not found: " + spec.trace_path);
        }
        probe.close();
        std::vector<GazePoint> trace = read_gaze_trace(spec.trace_path);
        if (trace.back().t_s < duration_s - 1e-9) {
            throw Error(ErrorCode::TraceTooShort, "gaze trace ends before duration_s");
        }
        return trace;
    }
    }
    throw Error(ErrorCode::ConfigError, "unreachable gaze kind");
}

} // namespace gazelab
