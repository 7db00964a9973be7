#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "gazelab/error.hpp"
#include "gazelab/trace.hpp"

namespace gazelab {

inline constexpr double kDegToRad = 0.01745329251994329576923690768489;

/// Per-scan signal conditioning knobs. Defaults are the VR settings;
/// the desktop profile turns the outlier filter and neighbor averaging on
/// and shortens the fit window to match its shorter scans.
struct SmoothingConfig {
    int sg_window = 27;
    int sg_order = 2;
    int neighbor_avg = 0;
    bool outlier_filter = false;
    double mad_threshold = 3.0;
};

// ---------------------------------------------------------------------------
// Offset models

struct ConstantOffset {
    double dx_deg = 0.0;
    double dy_deg = 0.0;
};

/// P_f = P_i - (a*theta + b), theta = probe angle at the extremum.
struct LinearOffset {
    double a_x = 0.0;
    double b_x = 0.0;
    double a_y = 0.0;
    double b_y = 0.0;
};

/// P_f = P_i - C + A*tan(K*(P_i - C)), angles in degrees.
struct TangentAxisParams {
    double c_deg = 0.0;
    double a = 0.0;
    double k = 0.0;
};

struct TangentOffset {
    TangentAxisParams x;
    TangentAxisParams y;
};

using OffsetModel = std::variant<ConstantOffset, LinearOffset, TangentOffset>;

inline OffsetModel identity_offset() { return ConstantOffset{0.0, 0.0}; }

inline double apply_offset(double p_i_deg, double theta_deg, Axis axis, const OffsetModel& model) {
    if (const auto* c = std::get_if<ConstantOffset>(&model)) {
        return p_i_deg - (axis == Axis::X ? c->dx_deg : c->dy_deg);
    }
    if (const auto* l = std::get_if<LinearOffset>(&model)) {
        const double a = axis == Axis::X ? l->a_x : l->a_y;
        const double b = axis == Axis::X ? l->b_x : l->b_y;
        return p_i_deg - (a * theta_deg + b);
    }
    const auto& t = std::get<TangentOffset>(model);
    const TangentAxisParams& p = axis == Axis::X ? t.x : t.y;
    const double arg_deg = p.k * (p_i_deg - p.c_deg);
    if (std::abs(arg_deg) >= 90.0) {
        throw Error(ErrorCode::TangentDomain, "tangent correction argument at or past 90 degrees");
    }
    return p_i_deg - p.c_deg + p.a * std::tan(arg_deg * kDegToRad);
}

// ---------------------------------------------------------------------------
// Signal conditioning

/// Replaces values more than `threshold` MADs from the scan median with the
/// median. With MAD = 0 every value differing from the median is replaced;
/// an infinite threshold leaves everything alone (inf * 0 compares false).
inline std::vector<double> filter_outliers(const std::vector<double>& series, double threshold) {
    if (series.size() < 3) {
        throw Error(ErrorCode::TooShort, "outlier filter needs at least 3 samples");
    }
    auto median_of = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
    };
    const double med = median_of(series);
    std::vector<double> dev(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) dev[i] = std::abs(series[i] - med);
    const double mad = median_of(dev);
    std::vector<double> out = series;
    for (double& v : out) {
        if (std::abs(v - med) > threshold * mad) v = med;
    }
    return out;
}

/// Center-point weights of a least-squares polynomial fit over a window:
/// smoothing is then a dot product per output sample. Solved from the
/// normal equations on abscissae scaled to [-1, 1], which keeps the Gram
/// matrix well conditioned for every (window, order) used here.
inline std::vector<double> sg_weights(int window, int order) {
    if (window < 1 || window % 2 == 0 || order < 0 || order >= window) {
        throw Error(ErrorCode::ConfigError, "SG window must be odd and order < window");
    }
    const int half = (window - 1) / 2;
    const double scale = half > 0 ? half : 1.0;
    const int m = order + 1;

    // Gram matrix G[p][q] = sum_j x_j^(p+q), x_j = j/scale.
    std::vector<double> pow_sum(2 * order + 1, 0.0);
    for (int j = -half; j <= half; ++j) {
        double xp = 1.0;
        const double x = j / scale;
        for (int p = 0; p <= 2 * order; ++p) {
            pow_sum[p] += xp;
            xp *= x;
        }
    }
    std::vector<std::vector<double>> g(m, std::vector<double>(m + 1, 0.0));
    for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) g[p][q] = pow_sum[p + q];
    }
    g[0][m] = 1.0; // solve G z = e0: the fitted value at x = 0 is coefficient 0

    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < m; ++col) {
        int pivot = col;
        for (int r = col + 1; r < m; ++r) {
            if (std::abs(g[r][col]) > std::abs(g[pivot][col])) pivot = r;
        }
        std::swap(g[col], g[pivot]);
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = g[r][col] / g[col][col];
            for (int c = col; c <= m; ++c) g[r][c] -= f * g[col][c];
        }
    }
    std::vector<double> z(m);
    for (int p = 0; p < m; ++p) z[p] = g[p][m] / g[p][p];

    std::vector<double> weights(window);
    for (int j = -half; j <= half; ++j) {
        const double x = j / scale;
        double xp = 1.0;
        double w = 0.0;
        for (int p = 0; p < m; ++p) {
            w += z[p] * xp;
            xp *= x;
        }
        weights[j + half] = w;
    }
    return weights;
}

/// Savitzky-Golay smoothing: each output point is the center value of the
/// least-squares polynomial fit over the window around it. Edges use
/// reflect padding without duplicating the edge sample (pad[-j] = s[j]),
/// so polynomial reproduction is exact in the interior and the ends stay
/// bounded by the data.
inline std::vector<double> smooth_sg(const std::vector<double>& series, int window, int order) {
    const std::vector<double> w = sg_weights(window, order);
    const int n = static_cast<int>(series.size());
    if (n < window) {
        throw Error(ErrorCode::SeriesShorterThanWindow, "series shorter than the SG window");
    }
    const int half = (window - 1) / 2;
    auto padded = [&](int i) {
        if (i < 0) return series[static_cast<std::size_t>(-i)];
        if (i >= n) return series[static_cast<std::size_t>(2 * (n - 1) - i)];
        return series[static_cast<std::size_t>(i)];
    };
    std::vector<double> out(series.size());
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = -half; j <= half; ++j) acc += w[static_cast<std::size_t>(j + half)] * padded(i + j);
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

/// Windowed mean with clamped edges: out[i] averages series[i-h .. i+h]
/// intersected with the series.
inline std::vector<double> neighbor_average(const std::vector<double>& series, int half_width) {
    if (series.empty()) {
        throw Error(ErrorCode::TooShort, "neighbor average needs a nonempty series");
    }
    if (half_width <= 0) return series;
    const int n = static_cast<int>(series.size());
    std::vector<double> out(series.size());
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half_width);
        const int hi = std::min(n - 1, i + half_width);
        double acc = 0.0;
        for (int j = lo; j <= hi; ++j) acc += series[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = acc / (hi - lo + 1);
    }
    return out;
}

struct Extremum {
    std::size_t index = 0;
    double t_s = 0.0;
    double theta_deg = 0.0;
};

/// Index of the smoothed extremum: maximum when load raises the metric,
/// minimum when it lowers it. Ties go to the earliest index.
inline Extremum locate_extremum(const ScanWindow& window, const std::vector<double>& smoothed,
                                MetricPolarity polarity) {
    if (smoothed.empty() || smoothed.size() != window.size()) {
        throw Error(ErrorCode::LengthMismatch, "smoothed series must match the window length");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < smoothed.size(); ++i) {
        const bool better = polarity == MetricPolarity::LoadIncreasesMetric
                                ? smoothed[i] > smoothed[best]
                                : smoothed[i] < smoothed[best];
        if (better) best = i;
    }
    return Extremum{best, window.t_s[best], window.hco_angle_deg[best]};
}

/// Conditions one scan window and returns its extremum. The probe angle at
/// the extremum is the raw (pre-correction) gaze estimate on that axis.
inline Extremum process_window(const ScanWindow& window, const SmoothingConfig& smoothing,
                               MetricPolarity polarity) {
    std::vector<double> series = window.metric;
    if (smoothing.outlier_filter) series = filter_outliers(series, smoothing.mad_threshold);
    series = smooth_sg(series, smoothing.sg_window, smoothing.sg_order);
    if (smoothing.neighbor_avg > 0) series = neighbor_average(series, smoothing.neighbor_avg);
    return locate_extremum(window, series, polarity);
}

/// Ground truth for one scan window: the gaze component on the scan axis,
/// read at the frame where the probe passes closest to it. Frames without
/// ground truth are skipped; earliest frame wins ties.
inline double per_axis_ground_truth(const ScanWindow& window) {
    const auto& gt = window.axis == Axis::X ? window.gt_x_deg : window.gt_y_deg;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < window.size(); ++i) {
        if (!gt[i].has_value()) continue;
        const double d = std::abs(window.hco_angle_deg[i] - *gt[i]);
        if (!best || d < std::abs(window.hco_angle_deg[*best] - *gt[*best])) best = i;
    }
    if (!best) {
        throw Error(ErrorCode::MissingGroundTruth, "scan window carries no ground-truth gaze");
    }
    return *gt[*best];
}

/// Raw estimate for one processed window, tagged with its position in the
/// grouped window list so X/Y pairing survives dropped windows.
struct ScanEstimate {
    std::size_t window_pos = 0;
    std::int64_t scan_id = 0;
    Axis axis = Axis::X;
    double t_s = 0.0;
    double p_i_deg = 0.0;
};

struct EstimateSet {
    std::vector<ScanEstimate> estimates;
    std::size_t dropped_windows = 0; // shorter than the SG window
};

inline EstimateSet estimate_scans(const SessionLog& log, const SmoothingConfig& smoothing) {
    EstimateSet set;
    const std::vector<ScanWindow> windows = group_scans(log);
    for (std::size_t pos = 0; pos < windows.size(); ++pos) {
        const ScanWindow& w = windows[pos];
        if (w.size() < static_cast<std::size_t>(smoothing.sg_window) || w.size() < 3) {
            ++set.dropped_windows;
            continue;
        }
        const Extremum ex = process_window(w, smoothing, log.polarity);
        set.estimates.push_back(ScanEstimate{pos, w.scan_id, w.axis, ex.t_s, ex.theta_deg});
    }
    return set;
}

/// Full attack pipeline: per-window conditioning and extremum, offset
/// correction, then pairing of each X window with the Y window that
/// follows it. The sample timestamp is the mean of the two extremum
/// times. Unpaired windows (trailing X, or a partner dropped for being
/// too short) produce no sample.
inline std::vector<GazeSample> infer_gaze(const SessionLog& log, const SmoothingConfig& smoothing,
                                          const OffsetModel& model) {
    const EstimateSet set = estimate_scans(log, smoothing);
    std::vector<GazeSample> samples;
    for (std::size_t i = 0; i + 1 < set.estimates.size(); ++i) {
        const ScanEstimate& a = set.estimates[i];
        const ScanEstimate& b = set.estimates[i + 1];
        if (a.axis != Axis::X || b.axis != Axis::Y || b.window_pos != a.window_pos + 1) continue;
        GazeSample s;
        s.t_s = (a.t_s + b.t_s) / 2.0;
        s.x_deg = apply_offset(a.p_i_deg, a.p_i_deg, Axis::X, model);
        s.y_deg = apply_offset(b.p_i_deg, b.p_i_deg, Axis::Y, model);
        samples.push_back(s);
    }
    return samples;
}

// ---------------------------------------------------------------------------
// Calibration

/// One scan's contribution to calibration: raw estimate and ground truth
/// on the scan axis.
struct CalibrationPoint {
    double p_i_deg = 0.0;
    double gt_deg = 0.0;
};

struct AxisPoints {
    std::vector<CalibrationPoint> x;
    std::vector<CalibrationPoint> y;
};

inline AxisPoints collect_calibration_points(const std::vector<SessionLog>& logs,
                                             const SmoothingConfig& smoothing) {
    AxisPoints points;
    for (const SessionLog& log : logs) {
        const std::vector<ScanWindow> windows = group_scans(log);
        const EstimateSet set = estimate_scans(log, smoothing);
        for (const ScanEstimate& est : set.estimates) {
            CalibrationPoint p;
            p.p_i_deg = est.p_i_deg;
            p.gt_deg = per_axis_ground_truth(windows[est.window_pos]);
            (est.axis == Axis::X ? points.x : points.y).push_back(p);
        }
    }
    return points;
}

inline double mean_abs_error(const std::vector<CalibrationPoint>& points, Axis axis,
                             const OffsetModel& model) {
    double acc = 0.0;
    for (const CalibrationPoint& p : points) {
        acc += std::abs(apply_offset(p.p_i_deg, p.p_i_deg, axis, model) - p.gt_deg);
    }
    return acc / points.size();
}

struct ConstantCalibration {
    ConstantOffset model;
    double mae_x = 0.0;
    double mae_y = 0.0;
    std::size_t n_x = 0;
    std::size_t n_y = 0;
};

/// Constant offsets: the mean of (raw estimate - ground truth) per axis.
inline ConstantCalibration calibrate_constant_points(const AxisPoints& points) {
    if (points.x.empty() || points.y.empty()) {
        throw Error(ErrorCode::NoScans, "constant calibration needs scans on both axes");
    }
    auto mean_diff = [](const std::vector<CalibrationPoint>& ps) {
        double acc = 0.0;
        for (const CalibrationPoint& p : ps) acc += p.p_i_deg - p.gt_deg;
        return acc / ps.size();
    };
    ConstantCalibration cal;
    cal.model.dx_deg = mean_diff(points.x);
    cal.model.dy_deg = mean_diff(points.y);
    cal.n_x = points.x.size();
    cal.n_y = points.y.size();
    cal.mae_x = mean_abs_error(points.x, Axis::X, OffsetModel{cal.model});
    cal.mae_y = mean_abs_error(points.y, Axis::Y, OffsetModel{cal.model});
    return cal;
}

inline ConstantCalibration calibrate_constant(const std::vector<SessionLog>& logs,
                                              const SmoothingConfig& smoothing) {
    return calibrate_constant_points(collect_calibration_points(logs, smoothing));
}

/// Inclusive arithmetic grid; values are min + i*step. The epsilon keeps
/// endpoints like 30.0 = 15 + 150*0.1 inside despite binary rounding.
struct GridRange {
    double min = 0.0;
    double max = 0.0;
    double step = 1.0;

    std::size_t count() const {
        if (step <= 0.0 || max < min) {
            throw Error(ErrorCode::EmptyGrid, "grid needs step > 0 and max >= min");
        }
        return static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
    }
    double value(std::size_t i) const { return min + static_cast<double>(i) * step; }
};

struct LinearGrid {
    GridRange a{-1.0, 1.0, 0.01};
    GridRange b{-15.0, 15.0, 0.1};
};

struct LinearCalibration {
    LinearOffset model;
    double mae_x = 0.0;
    double mae_y = 0.0;
};

struct LinearAxisFit {
    double a = 0.0;
    double b = 0.0;
    double mae = 0.0;
};

/// Exhaustive grid search minimizing mean |P_f - gt|. Scanning a then b in
/// ascending order with strict improvement makes ties resolve to the
/// smallest a, then smallest b.
inline LinearAxisFit calibrate_linear_axis(const std::vector<CalibrationPoint>& points, Axis axis,
                                           const LinearGrid& grid) {
    if (points.empty()) {
        throw Error(ErrorCode::NoScans, "linear calibration needs at least one scan");
    }
    const std::size_t na = grid.a.count();
    const std::size_t nb = grid.b.count();
    LinearAxisFit best;
    bool have_best = false;
    for (std::size_t ia = 0; ia < na; ++ia) {
        for (std::size_t ib = 0; ib < nb; ++ib) {
            LinearOffset cand;
            (axis == Axis::X ? cand.a_x : cand.a_y) = grid.a.value(ia);
            (axis == Axis::X ? cand.b_x : cand.b_y) = grid.b.value(ib);
            const double mae = mean_abs_error(points, axis, OffsetModel{cand});
            if (!have_best || mae < best.mae) {
                best = LinearAxisFit{grid.a.value(ia), grid.b.value(ib), mae};
                have_best = true;
            }
        }
    }
    return best;
}

inline LinearCalibration calibrate_linear_points(const AxisPoints& points, const LinearGrid& grid) {
    const LinearAxisFit fx = calibrate_linear_axis(points.x, Axis::X, grid);
    const LinearAxisFit fy = calibrate_linear_axis(points.y, Axis::Y, grid);
    LinearCalibration cal;
    cal.model = LinearOffset{fx.a, fx.b, fy.a, fy.b};
    cal.mae_x = fx.mae;
    cal.mae_y = fy.mae;
    return cal;
}

inline LinearCalibration calibrate_linear(const std::vector<SessionLog>& logs,
                                          const SmoothingConfig& smoothing,
                                          const LinearGrid& grid = {}) {
    return calibrate_linear_points(collect_calibration_points(logs, smoothing), grid);
}

struct TangentGrid {
    GridRange c{15.0, 30.0, 0.1};
    GridRange a{10.0, 40.0, 0.2};
    GridRange k{1.0, 4.0, 0.2};
};

struct TangentAxisFit {
    TangentAxisParams params;
    double mae = 0.0;
    std::size_t skipped = 0; // stage-2 candidates rejected for leaving the tan domain
    std::size_t stage2_candidates = 0;
};

/// Two-stage tangent fit. Stage 1 scans C alone (A = K = 0 reduces the
/// model to a constant shift). Stage 2 fixes that C and scans the (A, K)
/// grid jointly; candidates whose argument reaches 90 degrees for any
/// calibration point are skipped and counted. If every stage-2 candidate
/// is skipped the stage-1 constant fit stands (A = K = 0).
inline TangentAxisFit calibrate_tangent_axis(const std::vector<CalibrationPoint>& points, Axis axis,
                                             const TangentGrid& grid) {
    if (points.empty()) {
        throw Error(ErrorCode::NoScans, "tangent calibration needs at least one scan");
    }
    auto axis_model = [axis](TangentAxisParams p) {
        TangentOffset model;
        (axis == Axis::X ? model.x : model.y) = p;
        return OffsetModel{model};
    };

    const std::size_t nc = grid.c.count();
    TangentAxisParams best{grid.c.value(0), 0.0, 0.0};
    double best_mae = mean_abs_error(points, axis, axis_model(best));
    for (std::size_t ic = 1; ic < nc; ++ic) {
        TangentAxisParams cand{grid.c.value(ic), 0.0, 0.0};
        const double mae = mean_abs_error(points, axis, axis_model(cand));
        if (mae < best_mae) {
            best = cand;
            best_mae = mae;
        }
    }

    const double c_star = best.c_deg;
    TangentAxisFit fit;
    fit.params = best;
    fit.mae = best_mae;
    const std::size_t na = grid.a.count();
    const std::size_t nk = grid.k.count();
    fit.stage2_candidates = na * nk;
    bool have_stage2 = false;
    for (std::size_t ia = 0; ia < na; ++ia) {
        for (std::size_t ik = 0; ik < nk; ++ik) {
            TangentAxisParams cand{c_star, grid.a.value(ia), grid.k.value(ik)};
            double mae;
            try {
                mae = mean_abs_error(points, axis, axis_model(cand));
            } catch (const Error& e) {
                if (e.code() == ErrorCode::TangentDomain) {
                    ++fit.skipped;
                    continue;
                }
                throw;
            }
            // The first surviving candidate replaces the stage-1 fallback
            // even if its MAE is worse: stage 2 answers with an (A, K) pair.
            if (!have_stage2 || mae < fit.mae) {
                fit.params = cand;
                fit.mae = mae;
            }
            have_stage2 = true;
        }
    }
    return fit;
}

struct TangentCalibration {
    TangentOffset model;
    double mae_x = 0.0;
    double mae_y = 0.0;
    std::size_t skipped_x = 0;
    std::size_t skipped_y = 0;
    std::size_t stage2_candidates = 0;
};

inline TangentCalibration calibrate_tangent_points(const AxisPoints& points,
                                                   const TangentGrid& grid) {
    const TangentAxisFit fx = calibrate_tangent_axis(points.x, Axis::X, grid);
    const TangentAxisFit fy = calibrate_tangent_axis(points.y, Axis::Y, grid);
    TangentCalibration cal;
    cal.model = TangentOffset{fx.params, fy.params};
    cal.mae_x = fx.mae;
    cal.mae_y = fy.mae;
    cal.skipped_x = fx.skipped;
    cal.skipped_y = fy.skipped;
    cal.stage2_candidates = fx.stage2_candidates;
    return cal;
}

inline TangentCalibration calibrate_tangent(const std::vector<SessionLog>& logs,
                                            const SmoothingConfig& smoothing,
                                            const TangentGrid& grid = {}) {
    return calibrate_tangent_points(collect_calibration_points(logs, smoothing), grid);
}

// ---------------------------------------------------------------------------
// Leave-one-out cross-validation

struct LoocvFold {
    double mean_x = 0.0;
    double sd_x = 0.0;
    double mean_y = 0.0;
    double sd_y = 0.0;
    std::size_t n_x = 0;
    std::size_t n_y = 0;
};

struct LoocvResult {
    std::vector<LoocvFold> folds;
    LoocvFold average; // columnwise mean of the fold rows
};

using Calibrator = std::function<OffsetModel(const std::vector<SessionLog>&)>;

/// Leave-one-group-out: fit on all groups but one, score absolute per-axis
/// errors on the held-out group. SDs are population SDs over the fold's
/// per-scan absolute errors.
inline LoocvResult evaluate_loocv(const std::vector<std::vector<SessionLog>>& groups,
                                  const SmoothingConfig& smoothing, const Calibrator& calibrator) {
    if (groups.size() < 2) {
        throw Error(ErrorCode::FewerThanTwoGroups, "LOOCV needs at least two groups");
    }
    auto mean_sd = [](const std::vector<double>& v, double& mean, double& sd) {
        mean = 0.0;
        for (double x : v) mean += x;
        mean /= v.empty() ? 1 : v.size();
        double m2 = 0.0;
        for (double x : v) m2 += (x - mean) * (x - mean);
        sd = v.empty() ? 0.0 : std::sqrt(m2 / v.size());
    };

    LoocvResult result;
    for (std::size_t hold = 0; hold < groups.size(); ++hold) {
        std::vector<SessionLog> train;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (g == hold) continue;
            train.insert(train.end(), groups[g].begin(), groups[g].end());
        }
        const OffsetModel model = calibrator(train);
        const AxisPoints held = collect_calibration_points(groups[hold], smoothing);
        std::vector<double> err_x;
        std::vector<double> err_y;
        for (const CalibrationPoint& p : held.x) {
            err_x.push_back(std::abs(apply_offset(p.p_i_deg, p.p_i_deg, Axis::X, model) - p.gt_deg));
        }
        for (const CalibrationPoint& p : held.y) {
            err_y.push_back(std::abs(apply_offset(p.p_i_deg, p.p_i_deg, Axis::Y, model) - p.gt_deg));
        }
        LoocvFold fold;
        fold.n_x = err_x.size();
        fold.n_y = err_y.size();
        mean_sd(err_x, fold.mean_x, fold.sd_x);
        mean_sd(err_y, fold.mean_y, fold.sd_y);
        result.folds.push_back(fold);
    }
    LoocvFold avg;
    for (const LoocvFold& f : result.folds) {
        avg.mean_x += f.mean_x;
        avg.sd_x += f.sd_x;
        avg.mean_y += f.mean_y;
        avg.sd_y += f.sd_y;
        avg.n_x += f.n_x;
        avg.n_y += f.n_y;
    }
    const double nf = static_cast<double>(result.folds.size());
    avg.mean_x /= nf;
    avg.sd_x /= nf;
    avg.mean_y /= nf;
    avg.sd_y /= nf;
    result.average = avg;
    return result;
}

} // namespace gazelab
