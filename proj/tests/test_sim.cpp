#include <catch2/catch_amalgamated.hpp>

#include "gazelab/sim.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

using namespace gazelab;

namespace {

// Straight-line reimplementation of the frame recurrence, sharing only
// the geometric primitives with the simulator. Returns the logged metric
// stream for comparison.
std::vector<double> recurrence_reference(const std::vector<GazePoint>& trace,
                                         const ScanSchedule& schedule, const HcoConfig& hco,
                                         const CostModel& cost, const FoveationConfig& fovcfg,
                                         double duration_s, MetricPolarity polarity) {
    Rng rng(cost.seed);
    std::vector<std::pair<double, double>> hist;
    std::vector<double> metrics;
    const double period = schedule.t_scan_s + schedule.idle_gap_s;
    double t = 0.0;
    double noise = 0.0;
    for (std::size_t k = 0; t < duration_s; ++k) {
        const long scan = static_cast<long>(std::floor(t / period));
        const double tau = t - scan * period;
        const bool in_sweep = tau < schedule.t_scan_s;
        const Axis axis = scan % 2 == 0 ? Axis::X : Axis::Y;
        const long tick = static_cast<long>(std::floor(t / fovcfg.update_period_s));
        const GazePoint& g = sample_trace(trace, tick * fovcfg.update_period_s);
        const ShadingRateMap map = build_map(g.x_deg, g.y_deg, fovcfg);

        double f_fov = 0.0, f_peri = 0.0;
        if (in_sweep && hco.active) {
            const double theta = hco_position(tau, axis, schedule);
            const OverlapWeights w =
                overlap_weights(hco_rect(theta, axis, schedule, hco), map, fovcfg);
            f_fov = w.fovea;
            f_peri = w.perifovea;
        }
        hist.emplace_back(f_fov, f_peri);
        const std::size_t lag =
            k >= static_cast<std::size_t>(cost.latency_frames) ? k - cost.latency_frames : 0;
        noise = cost.rho * noise + cost.sigma_ms * rng.next_gaussian();
        double d = cost.base_frame_time_ms +
                   hco.cost_weight * (cost.k_fovea_ms * hist[lag].first +
                                      cost.k_peri_ms * hist[lag].second) +
                   noise;
        if (d < 1e-3) d = 1e-3;
        if (in_sweep) {
            metrics.push_back(polarity == MetricPolarity::LoadIncreasesMetric ? d : 1000.0 / d);
        }
        t += d / 1000.0;
    }
    return metrics;
}

} // namespace

TEST_CASE("hco_position sweeps linearly across the view", "[sim]") {
    const ScanSchedule s; // 0.5 s, 107.52 x 75
    REQUIRE(hco_position(0.25, Axis::X, s) == 0.0);
    REQUIRE(hco_position(0.0, Axis::X, s) == -53.76);
    ScanSchedule desktop;
    desktop.t_scan_s = 0.2;
    REQUIRE(hco_position(0.15, Axis::Y, desktop) == Catch::Approx(18.75).margin(1e-12));
}

TEST_CASE("hco_position rejects times outside the scan", "[sim]") {
    const ScanSchedule s;
    try {
        hco_position(0.51, Axis::X, s);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::OutOfScan);
    }
}

TEST_CASE("the probe strip spans the full cross axis", "[sim]") {
    const ScanSchedule s;
    const HcoConfig h;
    const RectDeg rx = hco_rect(10.0, Axis::X, s, h);
    REQUIRE(rx.x_min == Catch::Approx(10.0 - h.width_x_deg / 2));
    REQUIRE(rx.x_max == Catch::Approx(10.0 + h.width_x_deg / 2));
    REQUIRE(rx.y_min == -s.fov_y_deg / 2);
    REQUIRE(rx.y_max == s.fov_y_deg / 2);
    const RectDeg ry = hco_rect(-5.0, Axis::Y, s, h);
    REQUIRE(ry.x_min == -s.fov_x_deg / 2);
    REQUIRE(ry.x_max == s.fov_x_deg / 2);
    REQUIRE(ry.y_min == Catch::Approx(-5.0 - h.height_y_deg / 2));
    REQUIRE(ry.y_max == Catch::Approx(-5.0 + h.height_y_deg / 2));
}

TEST_CASE("frame step and latency bias follow the schedule arithmetic", "[sim]") {
    // One frame advances the probe by fov * d / t_scan degrees.
    REQUIRE(frame_step_deg(107.52, 1.0 / 120.0, 0.2) == Catch::Approx(4.48));
    REQUIRE(predicted_latency_bias_deg(2, 1.0 / 120.0, 107.52, 0.2) == Catch::Approx(8.96));
    REQUIRE(predicted_latency_bias_deg(0, 1.0 / 120.0, 107.52, 0.2) == 0.0);
}

TEST_CASE("the quietest frame sits where the probe crosses the gaze", "[sim]") {
    ScanSchedule schedule;
    schedule.t_scan_s = 0.2;
    schedule.fov_x_deg = 107.52;
    schedule.fov_y_deg = 75.0;
    HcoConfig hco;
    CostModel cost; // zero noise, zero latency
    const FoveationConfig fovcfg;

    const SessionLog log =
        simulate_session(make_fixed_trace(0.0, 0.0, 0.2), schedule, hco, cost, fovcfg, 0.2,
                         MetricPolarity::LoadDecreasesMetric);
    const std::vector<ScanWindow> windows = group_scans(log);
    REQUIRE(windows.size() == 1);
    const ScanWindow& w = windows[0];

    std::size_t min_i = 0;
    double best_angle = 1e300;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w.metric[i] < w.metric[min_i]) min_i = i;
        if (std::abs(w.hco_angle_deg[i]) < std::abs(best_angle)) {
            best_angle = w.hco_angle_deg[i];
        }
    }
    REQUIRE(w.hco_angle_deg[min_i] == best_angle);
}

TEST_CASE("latency delays the metric response by exactly L frames", "[sim]") {
    ScanSchedule schedule;
    schedule.t_scan_s = 0.2;
    HcoConfig hco;
    FoveationConfig fovcfg;
    fovcfg.fov_x_deg = schedule.fov_x_deg;
    fovcfg.fov_y_deg = schedule.fov_y_deg;

    CostModel lagged;
    lagged.latency_frames = 3;

    const auto trace = make_fixed_trace(5.0, -3.0, 0.2);
    const SessionLog log = simulate_session(trace, schedule, hco, lagged, fovcfg, 0.2,
                                            MetricPolarity::LoadIncreasesMetric);
    const ScanWindow w = group_scans(log)[0];

    // With zero noise the frame cost at k is a function of the overlap at
    // k - L, so the metric peak must trail the overlap peak by exactly L.
    const ShadingRateMap map = build_map(5.0, -3.0, fovcfg);
    std::size_t peak_overlap = 0, peak_metric = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const OverlapWeights ov =
            overlap_weights(hco_rect(w.hco_angle_deg[i], Axis::X, schedule, hco), map, fovcfg);
        const double score = lagged.k_fovea_ms * ov.fovea + lagged.k_peri_ms * ov.perifovea;
        if (score > best_score) {
            best_score = score;
            peak_overlap = i;
        }
        if (w.metric[i] > w.metric[peak_metric]) peak_metric = i;
    }
    REQUIRE(peak_metric == peak_overlap + 3);
}

TEST_CASE("a 30 s session cuts into the scheduled number of scans", "[sim]") {
    ScanSchedule schedule;
    schedule.t_scan_s = 0.2;
    HcoConfig hco;
    hco.cost_weight = 0.01; // keep the load perturbation tiny
    CostModel cost;
    cost.base_frame_time_ms = 5.0; // 200 FPS
    FoveationConfig fovcfg;
    fovcfg.fov_x_deg = schedule.fov_x_deg;
    fovcfg.fov_y_deg = schedule.fov_y_deg;

    const SessionLog log =
        simulate_session(make_fixed_trace(0.0, 0.0, 30.0), schedule, hco, cost, fovcfg, 30.0,
                         MetricPolarity::LoadIncreasesMetric);
    const std::vector<ScanWindow> windows = group_scans(log);
    REQUIRE(windows.size() == 150);
    for (const ScanWindow& w : windows) {
        REQUIRE(w.size() >= 38);
        REQUIRE(w.size() <= 41);
    }
    double mean = 0.0;
    for (const FrameRecord& r : log.records) mean += r.metric;
    mean /= static_cast<double>(log.records.size());
    REQUIRE(std::abs(mean - cost.base_frame_time_ms) / cost.base_frame_time_ms < 0.02);
}

TEST_CASE("the logged metric equals an independent recomputation of the recurrence",
          "[sim]") {
    ScanSchedule schedule;
    schedule.t_scan_s = 0.2;
    schedule.idle_gap_s = 0.05;
    HcoConfig hco;
    CostModel cost;
    cost.sigma_ms = 0.2;
    cost.rho = 0.4;
    cost.latency_frames = 2;
    cost.seed = 77;
    FoveationConfig fovcfg;
    fovcfg.fov_x_deg = schedule.fov_x_deg;
    fovcfg.fov_y_deg = schedule.fov_y_deg;

    const auto trace = make_walk_trace(9, 3.0, schedule.fov_x_deg, schedule.fov_y_deg);
    const SessionLog log = simulate_session(trace, schedule, hco, cost, fovcfg, 3.0,
                                            MetricPolarity::LoadDecreasesMetric);
    const std::vector<double> expected = recurrence_reference(
        trace, schedule, hco, cost, fovcfg, 3.0, MetricPolarity::LoadDecreasesMetric);

    REQUIRE(log.records.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        REQUIRE(log.records[i].metric == expected[i]);
    }
}

TEST_CASE("identical seeds reproduce identical sessions", "[sim]") {
    ScanSchedule schedule;
    schedule.t_scan_s = 0.2;
    HcoConfig hco;
    CostModel cost;
    cost.sigma_ms = 0.12;
    cost.rho = 0.3;
    cost.seed = 4242;
    FoveationConfig fovcfg;
    fovcfg.fov_x_deg = schedule.fov_x_deg;
    fovcfg.fov_y_deg = schedule.fov_y_deg;

    const auto trace = make_fixed_trace(2.0, 1.0, 2.0);
    const SessionLog a = simulate_session(trace, schedule, hco, cost, fovcfg, 2.0,
                                          MetricPolarity::LoadDecreasesMetric);
    const SessionLog b = simulate_session(trace, schedule, hco, cost, fovcfg, 2.0,
                                          MetricPolarity::LoadDecreasesMetric);
    REQUIRE(serialize_log(a) == serialize_log(b));
    REQUIRE(a.generator.has_value());
}

TEST_CASE("an inactive probe logs a parked angle and flat load", "[sim]") {
    ScanSchedule schedule;
    schedule.t_scan_s = 0.2;
    HcoConfig hco;
    hco.active = false;
    CostModel cost;
    FoveationConfig fovcfg;
    fovcfg.fov_x_deg = schedule.fov_x_deg;
    fovcfg.fov_y_deg = schedule.fov_y_deg;

    const SessionLog log =
        simulate_session(make_fixed_trace(0.0, 0.0, 1.0), schedule, hco, cost, fovcfg, 1.0,
                         MetricPolarity::LoadIncreasesMetric);
    for (const FrameRecord& r : log.records) {
        REQUIRE(r.metric == cost.base_frame_time_ms);
        const double parked =
            r.axis == Axis::X ? -schedule.fov_x_deg / 2 : -schedule.fov_y_deg / 2;
        REQUIRE(r.hco_angle_deg == parked);
    }
}

TEST_CASE("a gaze trace that stops early is rejected", "[sim]") {
    const ScanSchedule schedule;
    const HcoConfig hco;
    const CostModel cost;
    const FoveationConfig fovcfg;
    try {
        simulate_session(make_fixed_trace(0.0, 0.0, 1.0), schedule, hco, cost, fovcfg, 2.0,
                         MetricPolarity::LoadIncreasesMetric);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::TraceTooShort);
    }
    try {
        simulate_session(make_fixed_trace(0.0, 0.0, 1.0), schedule, hco, cost, fovcfg, 0.0,
                         MetricPolarity::LoadIncreasesMetric);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::TraceTooShort);
    }
}

TEST_CASE("walk traces are seeded, bounded, and cover the duration", "[sim]") {
    const auto a = make_walk_trace(11, 10.0, 107.52, 75.0);
    const auto b = make_walk_trace(11, 10.0, 107.52, 75.0);
    const auto c = make_walk_trace(12, 10.0, 107.52, 75.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].x_deg == b[i].x_deg);
        REQUIRE(std::abs(a[i].x_deg) <= 0.5 * 0.7 * 107.52 + 1e-12);
        REQUIRE(std::abs(a[i].y_deg) <= 0.5 * 0.7 * 75.0 + 1e-12);
    }
    REQUIRE(a.back().t_s >= 10.0);
    bool differs = a.size() != c.size();
    for (std::size_t i = 0; !differs && i < a.size(); ++i) {
        differs = a[i].x_deg != c[i].x_deg;
    }
    REQUIRE(differs);
}
