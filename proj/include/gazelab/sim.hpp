#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "gazelab/error.hpp"
#include "gazelab/foveation.hpp"
#include "gazelab/rng.hpp"
#include "gazelab/trace.hpp"

namespace gazelab {

/// Sweep timing. Sweeps alternate X (theta from -fov_x/2 to +fov_x/2)
/// then Y (-fov_y/2 to +fov_y/2), starting with X, optionally separated
/// by an idle gap.
struct ScanSchedule {
    double t_scan_s = 0.5;
    double fov_x_deg = 107.52;
    double fov_y_deg = 75.0;
    double idle_gap_s = 0.0;
};

/// Probe object footprint. X sweeps move a vertical strip of width
/// `width_x_deg` spanning the full FOV height; Y sweeps move a horizontal
/// strip of height `height_y_deg` spanning the full width. `cost_weight`
/// scales the whole overlap cost term (stand-in for object count) and
/// `active = false` parks the object with zero cost, for baseline logs.
struct HcoConfig {
    double width_x_deg = 5.3;
    double height_y_deg = 6.9;
    double cost_weight = 1.0;
    bool active = true;
};

/// Per-frame cost: d_k = base + cost_weight*(k_fovea*f_fov + k_peri*f_peri)
/// evaluated on the overlap of frame k - latency_frames, plus AR(1) noise
/// n_k = rho*n_{k-1} + sigma*eps_k. All times in milliseconds.
struct CostModel {
    double base_frame_time_ms = 1000.0 / 120.0;
    double k_fovea_ms = 8.0;
    double k_peri_ms = 1.5;
    int latency_frames = 0;
    double sigma_ms = 0.0;
    double rho = 0.0;
    std::uint64_t seed = 1;
};

inline double hco_position(double t_in_scan_s, Axis axis, const ScanSchedule& schedule) {
    if (t_in_scan_s < 0.0 || t_in_scan_s > schedule.t_scan_s) {
        throw Error(ErrorCode::OutOfScan, "time outside the scan window");
    }
    const double fov = axis == Axis::X ? schedule.fov_x_deg : schedule.fov_y_deg;
    return -fov / 2 + fov * (t_in_scan_s / schedule.t_scan_s);
}

/// Angle the probe travels during one mean frame: the attack's intrinsic
/// spatial resolution.
inline double frame_step_deg(double fov_deg, double mean_frame_s, double t_scan_s) {
    return fov_deg * mean_frame_s / t_scan_s;
}

/// Expected pre-correction estimator bias from a pipeline delay of
/// `latency_frames`: the probe keeps moving while the cost signal is in
/// flight, so the extremum lands late by exactly that many frame-steps.
inline double predicted_latency_bias_deg(int latency_frames, double mean_frame_s, double fov_deg,
                                         double t_scan_s) {
    return latency_frames * frame_step_deg(fov_deg, mean_frame_s, t_scan_s);
}

inline RectDeg hco_rect(double theta_deg, Axis axis, const ScanSchedule& schedule,
                        const HcoConfig& hco) {
    RectDeg rect;
    if (axis == Axis::X) {
        rect.x_min = theta_deg - hco.width_x_deg / 2;
        rect.x_max = theta_deg + hco.width_x_deg / 2;
        rect.y_min = -schedule.fov_y_deg / 2;
        rect.y_max = schedule.fov_y_deg / 2;
    } else {
        rect.x_min = -schedule.fov_x_deg / 2;
        rect.x_max = schedule.fov_x_deg / 2;
        rect.y_min = theta_deg - hco.height_y_deg / 2;
        rect.y_max = theta_deg + hco.height_y_deg / 2;
    }
    return rect;
}

/// Runs the frame loop over [0, duration): frame k starts at t_k, lasts
/// d_k per the cost model, and t_{k+1} = t_k + d_k/1000. The shading map
/// refreshes on its own clock (cfg.update_period_s) from the gaze trace;
/// each frame uses the most recent map. Frames inside an active sweep are
/// logged with the probe angle and true gaze; idle-gap frames advance time
/// but are not logged. Frame durations are floored at 1 microsecond so
/// noise can never stall or reverse the clock.
inline SessionLog simulate_session(const std::vector<GazePoint>& gaze_trace,
                                   const ScanSchedule& schedule, const HcoConfig& hco,
                                   const CostModel& cost, const FoveationConfig& fovcfg,
                                   double duration_s, MetricPolarity polarity) {
    if (duration_s <= 0.0) {
        throw Error(ErrorCode::TraceTooShort, "session duration must be positive");
    }
    if (gaze_trace.empty() || gaze_trace.front().t_s > 1e-9 ||
        gaze_trace.back().t_s < duration_s - 1e-9) {
        throw Error(ErrorCode::TraceTooShort, "gaze trace does not cover the session");
    }

    Rng rng(cost.seed);
    std::vector<FrameRecord> records;
    std::vector<std::pair<double, double>> overlap_hist; // (f_fovea, f_peri) per frame

    const double period_s = schedule.t_scan_s + schedule.idle_gap_s;
    ShadingRateMap map;
    long map_tick = -1;

    double t = 0.0;
    double noise = 0.0;
    for (std::size_t k = 0; t < duration_s; ++k) {
        const long scan = static_cast<long>(std::floor(t / period_s));
        const double tau = t - scan * period_s;
        const bool in_sweep = tau < schedule.t_scan_s;
        const Axis axis = scan % 2 == 0 ? Axis::X : Axis::Y;

        const long tick = static_cast<long>(std::floor(t / fovcfg.update_period_s));
        if (tick != map_tick) {
            const GazePoint& g = sample_trace(gaze_trace, tick * fovcfg.update_period_s);
            if (map_tick < 0 || g.x_deg != map.gaze_x_deg || g.y_deg != map.gaze_y_deg) {
                map = build_map(g.x_deg, g.y_deg, fovcfg);
            }
            map_tick = tick;
        }

        double theta = 0.0;
        double f_fovea = 0.0;
        double f_peri = 0.0;
        if (in_sweep) {
            theta = hco_position(tau, axis, schedule);
            if (hco.active) {
                OverlapWeights w = overlap_weights(hco_rect(theta, axis, schedule, hco), map, fovcfg);
                f_fovea = w.fovea;
                f_peri = w.perifovea;
            }
        }
        overlap_hist.emplace_back(f_fovea, f_peri);

        const std::size_t lag_idx = k >= static_cast<std::size_t>(cost.latency_frames)
                                        ? k - cost.latency_frames
                                        : 0;
        const auto [lf, lp] = overlap_hist[lag_idx];
        noise = cost.rho * noise + cost.sigma_ms * rng.next_gaussian();
        double d_ms = cost.base_frame_time_ms +
                      hco.cost_weight * (cost.k_fovea_ms * lf + cost.k_peri_ms * lp) + noise;
        if (d_ms < 1e-3) d_ms = 1e-3;

        if (in_sweep) {
            const GazePoint& gt = sample_trace(gaze_trace, t);
            FrameRecord rec;
            rec.t_s = t;
            rec.metric = polarity == MetricPolarity::LoadIncreasesMetric ? d_ms : 1000.0 / d_ms;
            rec.hco_angle_deg = hco.active ? theta : (axis == Axis::X ? -schedule.fov_x_deg / 2
                                                                      : -schedule.fov_y_deg / 2);
            rec.axis = axis;
            rec.scan_id = scan + 1;
            rec.gt_x_deg = gt.x_deg;
            rec.gt_y_deg = gt.y_deg;
            records.push_back(rec);
        }

        t += d_ms / 1000.0;
    }
    return validate_log(std::move(records), polarity, std::string(kGeneratorTag));
}

// ---------------------------------------------------------------------------
// Gaze-trace synthesis

/// Constant gaze, covering [0, duration].
inline std::vector<GazePoint> make_fixed_trace(double x_deg, double y_deg, double duration_s) {
    return {{0.0, x_deg, y_deg}, {duration_s, x_deg, y_deg}};
}

/// Fixation-hop trace: a sequence of fixations at uniform random points
/// inside the central `margin` fraction of the FOV, each held for a
/// uniform random duration in [min_fix, max_fix]. Piecewise constant
/// under the zero-order-hold sampling used everywhere else.
inline std::vector<GazePoint> make_walk_trace(std::uint64_t seed, double duration_s,
                                              double fov_x_deg, double fov_y_deg,
                                              double min_fix_s = 0.4, double max_fix_s = 1.2,
                                              double margin = 0.7) {
    Rng rng(seed);
    std::vector<GazePoint> trace;
    double t = 0.0;
    while (t < duration_s) {
        GazePoint g;
        g.t_s = t;
        g.x_deg = (rng.next_unit() - 0.5) * margin * fov_x_deg;
        g.y_deg = (rng.next_unit() - 0.5) * margin * fov_y_deg;
        trace.push_back(g);
        t += min_fix_s + (max_fix_s - min_fix_s) * rng.next_unit();
    }
    GazePoint last = trace.back();
    last.t_s = duration_s;
    trace.push_back(last);
    return trace;
}

} // namespace gazelab
