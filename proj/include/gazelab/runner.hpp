#pragma once

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gazelab/config.hpp"
#include "gazelab/detector.hpp"
#include "gazelab/error.hpp"
#include "gazelab/inference.hpp"
#include "gazelab/sim.hpp"
#include "gazelab/svg.hpp"
#include "gazelab/text.hpp"
#include "gazelab/trace.hpp"

namespace gazelab {

namespace fs = std::filesystem;

/// Write-temp-then-rename so a crash never leaves a half-written artifact
/// and reruns settle to byte-identical files.
inline void atomic_write(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        out << content;
        if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Splits text into lines, dropping a trailing empty line and # comments.
inline std::vector<std::string_view> csv_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        if (!line.empty() && line.front() != '#') lines.push_back(line);
    }
    return lines;
}

// ---------------------------------------------------------------------------
// Session manifest

struct ManifestRow {
    std::string filename;
    std::string profile;
    double fps = 0.0;
    double foveation_strength = 1.0;
    double foveal_diameter = 21.0;
    double t_scan_s = 0.0;
    std::uint64_t seed = 0;
    bool attack = true;
};

inline constexpr std::string_view kManifestHeader =
    "filename,profile,fps,foveation_strength,foveal_diameter,t_scan_s,seed,attack";

inline std::string session_name(const std::string& profile, const SweepPoint& pt,
                                std::uint64_t seed) {
    std::string name = profile;
    name += "_fps" + fmt_double(pt.fps);
    name += "_fs" + fmt_double(pt.foveation_strength);
    name += "_fd" + fmt_double(pt.foveal_diameter);
    name += "_ts" + fmt_double(pt.t_scan_s * 1000.0);
    name += "_s" + fmt_int(static_cast<std::int64_t>(seed));
    if (!pt.attack) name += "_null";
    name += ".csv";
    return name;
}

inline std::vector<ManifestRow> read_manifest(const fs::path& dir) {
    const fs::path path = dir / "sessions.csv";
    if (!fs::exists(path)) {
        throw Error(ErrorCode::ConfigError, "no session manifest at " + path.string() +
                                                " (run the simulate subcommand first)");
    }
    const std::string text = read_file(path);
    const auto lines = csv_lines(text);
    if (lines.empty() || lines.front() != kManifestHeader) {
        throw Error(ErrorCode::ParseError, "bad manifest header in " + path.string());
    }
    std::vector<ManifestRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_csv_line(lines[i]);
        if (f.size() != 8) {
            throw Error(ErrorCode::ParseError, "manifest row needs 8 fields");
        }
        ManifestRow row;
        row.filename = std::string(f[0]);
        row.profile = std::string(f[1]);
        row.fps = parse_double(f[2], "fps");
        row.foveation_strength = parse_double(f[3], "foveation_strength");
        row.foveal_diameter = parse_double(f[4], "foveal_diameter");
        row.t_scan_s = parse_double(f[5], "t_scan_s");
        row.seed = static_cast<std::uint64_t>(parse_int(f[6], "seed"));
        row.attack = parse_int(f[7], "attack") != 0;
        rows.push_back(row);
    }
    return rows;
}

inline SessionLog load_session(const fs::path& logs_dir, const ManifestRow& row,
                               MetricPolarity polarity) {
    return read_log((logs_dir / "sessions" / row.filename).string(), polarity);
}

// ---------------------------------------------------------------------------
// simulate

inline int cmd_simulate(const ExperimentConfig& cfg, const fs::path& out_dir) {
    std::string manifest(kManifestHeader);
    manifest += '\n';
    std::size_t count = 0;
    for (const SweepPoint& pt : cfg.sweep) {
        for (std::uint64_t seed : cfg.seeds) {
            const Profile p = resolve_point(cfg.profile, pt, seed);
            const std::vector<GazePoint> trace = resolve_gaze(cfg.gaze, cfg.duration_s, p, seed);
            const SessionLog log = simulate_session(trace, p.schedule, p.hco, p.cost, p.foveation,
                                                    cfg.duration_s, p.polarity);
            const std::string name = session_name(p.name, pt, seed);
            atomic_write(out_dir / "sessions" / name, serialize_log(log));
            manifest += name + ',' + p.name + ',' + fmt_double(pt.fps) + ',' +
                        fmt_double(pt.foveation_strength) + ',' + fmt_double(pt.foveal_diameter) +
                        ',' + fmt_double(pt.t_scan_s) + ',' +
                        fmt_int(static_cast<std::int64_t>(seed)) + ',' +
                        (pt.attack ? "1" : "0") + '\n';
            ++count;
        }
    }
    atomic_write(out_dir / "sessions.csv", manifest);
    std::cout << "simulate: wrote " << count << " session logs under " << out_dir.string()
              << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// calibrate

inline Json offset_model_json(const OffsetModel& model) {
    Json j;
    if (const auto* c = std::get_if<ConstantOffset>(&model)) {
        j["family"] = "constant";
        j["dx_deg"] = c->dx_deg;
        j["dy_deg"] = c->dy_deg;
    } else if (const auto* l = std::get_if<LinearOffset>(&model)) {
        j["family"] = "linear";
        j["a_x"] = l->a_x;
        j["b_x"] = l->b_x;
        j["a_y"] = l->a_y;
        j["b_y"] = l->b_y;
    } else {
        const auto& t = std::get<TangentOffset>(model);
        j["family"] = "tangent";
        j["x"] = {{"c_deg", t.x.c_deg}, {"a", t.x.a}, {"k", t.x.k}};
        j["y"] = {{"c_deg", t.y.c_deg}, {"a", t.y.a}, {"k", t.y.k}};
    }
    return j;
}

inline OffsetModel offset_model_from_json(const Json& j) {
    const std::string family = j.at("family").get<std::string>();
    if (family == "constant") {
        return ConstantOffset{j.at("dx_deg").get<double>(), j.at("dy_deg").get<double>()};
    }
    if (family == "linear") {
        return LinearOffset{j.at("a_x").get<double>(), j.at("b_x").get<double>(),
                            j.at("a_y").get<double>(), j.at("b_y").get<double>()};
    }
    if (family == "tangent") {
        TangentOffset t;
        t.x = {j.at("x").at("c_deg").get<double>(), j.at("x").at("a").get<double>(),
               j.at("x").at("k").get<double>()};
        t.y = {j.at("y").at("c_deg").get<double>(), j.at("y").at("a").get<double>(),
               j.at("y").at("k").get<double>()};
        return t;
    }
    throw Error(ErrorCode::ParseError, "unknown offset model family: " + family);
}

/// Fits the profile's offset family on pooled logs. Used directly by the
/// LOOCV path and per FPS bucket by cmd_calibrate.
inline OffsetModel fit_family(const std::string& family, const std::vector<SessionLog>& logs,
                              const ExperimentConfig& cfg) {
    if (family == "constant") return calibrate_constant(logs, cfg.profile.smoothing).model;
    if (family == "linear") {
        return calibrate_linear(logs, cfg.profile.smoothing, cfg.linear_grid).model;
    }
    if (family == "tangent") {
        return calibrate_tangent(logs, cfg.profile.smoothing, cfg.tangent_grid).model;
    }
    throw Error(ErrorCode::ConfigError, "unknown offset family: " + family);
}

inline int cmd_calibrate(const ExperimentConfig& cfg, const fs::path& out_dir,
                         const fs::path& logs_dir) {
    const std::vector<ManifestRow> manifest = read_manifest(logs_dir);
    std::vector<ManifestRow> rows;
    for (const ManifestRow& r : manifest) {
        if (r.attack) rows.push_back(r);
    }
    if (rows.empty()) {
        throw Error(ErrorCode::NoScans, "manifest lists no attack sessions to calibrate on");
    }

    Json out;
    out["profile"] = cfg.profile.name;
    out["family"] = cfg.profile.offset_family;
    std::vector<SessionLog> all_logs;
    for (const ManifestRow& r : rows) {
        all_logs.push_back(load_session(logs_dir, r, cfg.profile.polarity));
    }

    if (cfg.profile.offset_family == "constant") {
        // One constant model per FPS target: the bias scales with frame
        // time, so a single pooled model would blur the buckets.
        std::map<double, std::vector<SessionLog>> buckets;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            buckets[rows[i].fps].push_back(all_logs[i]);
        }
        Json per_fps;
        for (const auto& [fps, logs] : buckets) {
            const ConstantCalibration cal = calibrate_constant(logs, cfg.profile.smoothing);
            Json b;
            b["dx_deg"] = cal.model.dx_deg;
            b["dy_deg"] = cal.model.dy_deg;
            b["mae_x_deg"] = cal.mae_x;
            b["mae_y_deg"] = cal.mae_y;
            b["n_x"] = cal.n_x;
            b["n_y"] = cal.n_y;
            per_fps[fmt_double(fps)] = b;
        }
        out["per_fps"] = per_fps;
    } else if (cfg.profile.offset_family == "linear") {
        const LinearCalibration cal =
            calibrate_linear(all_logs, cfg.profile.smoothing, cfg.linear_grid);
        out["model"] = offset_model_json(OffsetModel{cal.model});
        out["mae_x_deg"] = cal.mae_x;
        out["mae_y_deg"] = cal.mae_y;
    } else if (cfg.profile.offset_family == "tangent") {
        const TangentCalibration cal =
            calibrate_tangent(all_logs, cfg.profile.smoothing, cfg.tangent_grid);
        out["model"] = offset_model_json(OffsetModel{cal.model});
        out["mae_x_deg"] = cal.mae_x;
        out["mae_y_deg"] = cal.mae_y;
        out["stage2_candidates"] = cal.stage2_candidates;
        out["skipped_x"] = cal.skipped_x;
        out["skipped_y"] = cal.skipped_y;
    } else {
        throw Error(ErrorCode::ConfigError, "unknown offset family: " + cfg.profile.offset_family);
    }

    atomic_write(out_dir / "calibration.json", out.dump(2) + "\n");

    if (cfg.loocv && all_logs.size() >= 2) {
        std::vector<std::vector<SessionLog>> groups;
        for (const SessionLog& log : all_logs) groups.push_back({log});
        const std::string family = cfg.profile.offset_family;
        const LoocvResult res =
            evaluate_loocv(groups, cfg.profile.smoothing,
                           [&](const std::vector<SessionLog>& train) {
                               return fit_family(family, train, cfg);
                           });
        std::string csv = "fold,mean_x_deg,sd_x_deg,mean_y_deg,sd_y_deg,n_x,n_y\n";
        auto fold_row = [](const std::string& tag, const LoocvFold& f) {
            return tag + ',' + fmt_double(f.mean_x) + ',' + fmt_double(f.sd_x) + ',' +
                   fmt_double(f.mean_y) + ',' + fmt_double(f.sd_y) + ',' +
                   fmt_int(static_cast<std::int64_t>(f.n_x)) + ',' +
                   fmt_int(static_cast<std::int64_t>(f.n_y)) + '\n';
        };
        for (std::size_t i = 0; i < res.folds.size(); ++i) {
            csv += fold_row(fmt_int(static_cast<std::int64_t>(i + 1)), res.folds[i]);
        }
        csv += fold_row("average", res.average);
        atomic_write(out_dir / "loocv.csv", csv);
    }

    std::cout << "calibrate: family=" << cfg.profile.offset_family << " over " << rows.size()
              << " sessions -> " << (out_dir / "calibration.json").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// infer

/// Picks the offset model for a log. Constant calibrations carry one model
/// per FPS bucket; the nearest bucket serves when the exact target is
/// absent (calibration and evaluation FPS may differ).
inline OffsetModel model_for(const Json& calib, double fps) {
    if (calib.at("family").get<std::string>() != "constant") {
        return offset_model_from_json(calib.at("model"));
    }
    const Json& per_fps = calib.at("per_fps");
    std::optional<double> best_key;
    for (auto it = per_fps.begin(); it != per_fps.end(); ++it) {
        const double key = parse_double(it.key(), "per_fps key");
        if (!best_key || std::abs(key - fps) < std::abs(*best_key - fps)) best_key = key;
    }
    if (!best_key) throw Error(ErrorCode::ParseError, "calibration has no per_fps entries");
    const Json& b = per_fps.at(fmt_double(*best_key));
    return ConstantOffset{b.at("dx_deg").get<double>(), b.at("dy_deg").get<double>()};
}

inline int cmd_infer(const ExperimentConfig& cfg, const fs::path& out_dir,
                     const fs::path& logs_dir, const std::optional<fs::path>& calib_path,
                     bool identity) {
    const std::vector<ManifestRow> manifest = read_manifest(logs_dir);
    Json calib;
    if (!identity) {
        const fs::path path = calib_path.value_or(out_dir / "calibration.json");
        if (!fs::exists(path)) {
            throw Error(ErrorCode::ConfigError,
                        "no calibration at " + path.string() +
                            " (run the calibrate subcommand, or pass --identity)");
        }
        try {
            calib = Json::parse(read_file(path));
        } catch (const Json::exception& e) {
            throw Error(ErrorCode::ParseError, std::string("calibration parse: ") + e.what());
        }
    }

    std::string summary =
        "filename,fps,foveation_strength,foveal_diameter,t_scan_s,n_samples,mae_x_deg,mae_y_deg\n";
    std::size_t n_logs = 0;
    double total_abs = 0.0;
    std::size_t total_n = 0;
    for (const ManifestRow& row : manifest) {
        if (!row.attack) continue;
        const SessionLog log = load_session(logs_dir, row, cfg.profile.polarity);
        const OffsetModel model = identity ? identity_offset() : model_for(calib, row.fps);

        const std::vector<ScanWindow> windows = group_scans(log);
        const EstimateSet set = estimate_scans(log, cfg.profile.smoothing);

        std::string scans = "scan_id,axis,t_s,p_i_deg,p_f_deg,gt_deg,err_deg\n";
        std::vector<std::optional<double>> gts(set.estimates.size());
        for (std::size_t i = 0; i < set.estimates.size(); ++i) {
            const ScanEstimate& est = set.estimates[i];
            const double p_f = apply_offset(est.p_i_deg, est.p_i_deg, est.axis, model);
            try {
                gts[i] = per_axis_ground_truth(windows[est.window_pos]);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::MissingGroundTruth) throw;
            }
            scans += fmt_int(est.scan_id) + ',' + axis_name(est.axis) + ',' + fmt_double(est.t_s) +
                     ',' + fmt_double(est.p_i_deg) + ',' + fmt_double(p_f) + ',';
            if (gts[i]) {
                scans += fmt_double(*gts[i]);
                scans += ',' + fmt_double(p_f - *gts[i]);
            } else {
                scans += ",";
            }
            scans += '\n';
        }

        std::string pred = "t_s,pred_x_deg,pred_y_deg,gt_x_deg,gt_y_deg,err_x_deg,err_y_deg\n";
        double abs_x = 0.0, abs_y = 0.0;
        std::size_t n_x = 0, n_y = 0, n_samples = 0;
        for (std::size_t i = 0; i + 1 < set.estimates.size(); ++i) {
            const ScanEstimate& a = set.estimates[i];
            const ScanEstimate& b = set.estimates[i + 1];
            if (a.axis != Axis::X || b.axis != Axis::Y || b.window_pos != a.window_pos + 1) {
                continue;
            }
            const double px = apply_offset(a.p_i_deg, a.p_i_deg, Axis::X, model);
            const double py = apply_offset(b.p_i_deg, b.p_i_deg, Axis::Y, model);
            pred += fmt_double((a.t_s + b.t_s) / 2) + ',' + fmt_double(px) + ',' + fmt_double(py);
            if (gts[i]) {
                pred += ',' + fmt_double(*gts[i]);
            } else {
                pred += ",";
            }
            if (gts[i + 1]) {
                pred += ',' + fmt_double(*gts[i + 1]);
            } else {
                pred += ",";
            }
            if (gts[i]) {
                pred += ',' + fmt_double(px - *gts[i]);
                abs_x += std::abs(px - *gts[i]);
                ++n_x;
            } else {
                pred += ",";
            }
            if (gts[i + 1]) {
                pred += ',' + fmt_double(py - *gts[i + 1]);
                abs_y += std::abs(py - *gts[i + 1]);
                ++n_y;
            } else {
                pred += ",";
            }
            pred += '\n';
            ++n_samples;
        }

        atomic_write(out_dir / "predictions" / ("scans_" + row.filename), scans);
        atomic_write(out_dir / "predictions" / ("pred_" + row.filename), pred);

        summary += row.filename + ',' + fmt_double(row.fps) + ',' +
                   fmt_double(row.foveation_strength) + ',' + fmt_double(row.foveal_diameter) +
                   ',' + fmt_double(row.t_scan_s) + ',' +
                   fmt_int(static_cast<std::int64_t>(n_samples)) + ',';
        summary += n_x ? fmt_double(abs_x / n_x) : "";
        summary += ',';
        summary += n_y ? fmt_double(abs_y / n_y) : "";
        summary += '\n';
        total_abs += abs_x + abs_y;
        total_n += n_x + n_y;
        ++n_logs;
    }
    if (n_logs == 0) {
        throw Error(ErrorCode::NoScans, "manifest lists no attack sessions to infer on");
    }
    atomic_write(out_dir / "infer_summary.csv", summary);
    std::cout << "infer: " << n_logs << " logs";
    if (total_n) std::cout << ", overall MAE " << fmt_sig(total_abs / total_n, 4) << " deg";
    std::cout << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// detect

inline Json standardizer_json(const Standardizer& st) {
    return Json{{"means", st.means}, {"scales", st.scales}};
}

inline Standardizer standardizer_from_json(const Json& j) {
    Standardizer st;
    st.means = j.at("means").get<std::vector<double>>();
    st.scales = j.at("scales").get<std::vector<double>>();
    return st;
}

inline int cmd_detect(const ExperimentConfig& cfg, const fs::path& out_dir,
                      const fs::path& logs_dir, const std::optional<fs::path>& model_path) {
    const std::vector<ManifestRow> manifest = read_manifest(logs_dir);
    if (manifest.empty()) {
        throw Error(ErrorCode::NoScans, "manifest lists no sessions");
    }
    DetectorConfig det;
    det.window_len_s = cfg.detect.window_len_s;
    det.outlier_threshold = cfg.detect.outlier_threshold;

    std::vector<SessionLog> logs;
    for (const ManifestRow& row : manifest) {
        logs.push_back(load_session(logs_dir, row, cfg.profile.polarity));
    }
    std::vector<LabeledWindow> windows = cut_windows(logs, det.window_len_s, det);
    if (windows.empty()) {
        throw Error(ErrorCode::WindowTooShort,
                    "no window of the configured length has enough samples");
    }

    std::string feat_csv = "window_start_s,window_len_s,sd,skew,kurtosis,range,iqr,outlier_prop,label\n";
    for (const LabeledWindow& w : windows) {
        const auto a = w.features.as_array();
        feat_csv += fmt_double(w.start_s) + ',' + fmt_double(w.len_s);
        for (double v : a) feat_csv += ',' + fmt_double(v);
        feat_csv += ',' + fmt_int(w.label) + '\n';
    }
    atomic_write(out_dir / "features.csv", feat_csv);

    std::vector<WindowFeatures> feats;
    std::vector<int> labels;
    for (const LabeledWindow& w : windows) {
        feats.push_back(w.features);
        labels.push_back(w.label);
    }

    std::vector<int> predicted(windows.size(), 0);
    DetectionMetrics metrics;
    std::string metrics_scope;
    Json model_json;
    const std::uint64_t seed = cfg.seeds.front();

    if (model_path) {
        Json loaded;
        try {
            loaded = Json::parse(read_file(*model_path));
        } catch (const Json::exception& e) {
            throw Error(ErrorCode::ParseError, std::string("model parse: ") + e.what());
        }
        const std::string mode = loaded.at("mode").get<std::string>();
        if (mode == "kmeans") {
            KMeansModel km;
            km.standardizer = standardizer_from_json(loaded.at("standardizer"));
            km.centroids = loaded.at("centroids").get<std::vector<std::vector<double>>>();
            km.attack_cluster = loaded.at("attack_cluster").get<std::size_t>();
            for (std::size_t i = 0; i < feats.size(); ++i) predicted[i] = km.classify(feats[i]);
        } else {
            LogisticModel lm;
            lm.feature_idx = loaded.at("feature_idx").get<std::vector<std::size_t>>();
            lm.weights = loaded.at("weights").get<std::vector<double>>();
            lm.bias = loaded.at("bias").get<double>();
            lm.standardizer = standardizer_from_json(loaded.at("standardizer"));
            for (std::size_t i = 0; i < feats.size(); ++i) {
                predicted[i] = lm.classify(feats[i].as_array());
            }
        }
        metrics = evaluate_detector(predicted, labels);
        metrics_scope = "all windows, pretrained model";
        model_json = loaded;
    } else if (cfg.detect.mode == "kmeans") {
        const KMeansModel km = fit_kmeans(feats, 2, seed);
        for (std::size_t i = 0; i < feats.size(); ++i) predicted[i] = km.classify(feats[i]);
        metrics = evaluate_detector(predicted, labels);
        metrics_scope = "all windows, unsupervised";
        model_json["mode"] = "kmeans";
        model_json["standardizer"] = standardizer_json(km.standardizer);
        model_json["centroids"] = km.centroids;
        model_json["attack_cluster"] = km.attack_cluster;
        model_json["iterations"] = km.objective_history.size();
        model_json["objective"] = km.objective_history.back();
    } else {
        LogisticOptions opts;
        opts.weight_pos = cfg.detect.weight_pos;
        opts.weight_neg = cfg.detect.weight_neg;
        const std::vector<std::size_t> subset =
            cfg.detect.features == "two" ? two_features() : all_features();
        const LogisticFit lf = train_logistic(feats, labels, subset, seed, opts);
        for (std::size_t i = 0; i < feats.size(); ++i) {
            predicted[i] = lf.model.classify(feats[i].as_array());
        }
        metrics = lf.test;
        metrics_scope = "held-out 30%";
        model_json["mode"] = "logistic";
        model_json["feature_idx"] = lf.model.feature_idx;
        model_json["weights"] = lf.model.weights;
        model_json["bias"] = lf.model.bias;
        model_json["standardizer"] = standardizer_json(lf.model.standardizer);
        model_json["iterations"] = lf.iterations;
        model_json["final_loss"] = lf.final_loss;
    }
    model_json["window_len_s"] = det.window_len_s;
    model_json["outlier_threshold"] = det.outlier_threshold;
    model_json["precision"] = metrics.precision;
    model_json["recall"] = metrics.recall;
    model_json["f1"] = metrics.f1;
    model_json["metrics_scope"] = metrics_scope;
    if (!model_path) atomic_write(out_dir / "detect_model.json", model_json.dump(2) + "\n");

    std::string report = "filename,window_start_s,window_len_s,predicted,label\n";
    for (std::size_t i = 0; i < windows.size(); ++i) {
        report += manifest[windows[i].log_index].filename + ',' + fmt_double(windows[i].start_s) +
                  ',' + fmt_double(windows[i].len_s) + ',' + fmt_int(predicted[i]) + ',' +
                  fmt_int(windows[i].label) + '\n';
    }
    atomic_write(out_dir / "detect_report.csv", report);

    if (!cfg.detect.study_lengths.empty()) {
        const auto rows = window_length_study(logs, cfg.detect.study_lengths, det, seed);
        std::string csv = "window_len_s,n_windows,n_positive,precision,recall,f1\n";
        for (const WindowStudyRow& r : rows) {
            csv += fmt_double(r.window_len_s) + ',' +
                   fmt_int(static_cast<std::int64_t>(r.n_windows)) + ',' +
                   fmt_int(static_cast<std::int64_t>(r.n_positive)) + ',' +
                   fmt_double(r.precision) + ',' + fmt_double(r.recall) + ',';
            if (r.f1) csv += fmt_double(*r.f1);
            csv += '\n';
        }
        atomic_write(out_dir / "window_study.csv", csv);
    }

    std::cout << "detect: " << windows.size() << " windows (" << metrics_scope << ") precision="
              << fmt_sig(metrics.precision, 4) << " recall=" << fmt_sig(metrics.recall, 4)
              << " f1=" << fmt_sig(metrics.f1, 4) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// report

namespace report_detail {

/// Mean of a numeric column grouped by a key column; empty cells skipped.
struct GroupStat {
    double key = 0.0;
    double sum_x = 0.0, sum_y = 0.0;
    std::size_t n_x = 0, n_y = 0;
};

} // namespace report_detail

inline int cmd_report(const fs::path& out_dir) {
    std::vector<std::string> missing;
    std::vector<std::string> written;

    // error vs FPS and error vs scan time, both from the inference summary
    const fs::path summary_path = out_dir / "infer_summary.csv";
    if (fs::exists(summary_path)) {
        const std::string text = read_file(summary_path);
        const auto lines = csv_lines(text);
        struct Row {
            double fps, t_scan;
            std::optional<double> mae_x, mae_y;
        };
        std::vector<Row> rows;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const auto f = split_csv_line(lines[i]);
            if (f.size() != 8) continue;
            Row r{parse_double(f[1], "fps"), parse_double(f[4], "t_scan_s"), std::nullopt,
                  std::nullopt};
            if (!f[6].empty()) r.mae_x = parse_double(f[6], "mae_x_deg");
            if (!f[7].empty()) r.mae_y = parse_double(f[7], "mae_y_deg");
            rows.push_back(r);
        }
        auto grouped = [&rows](bool by_fps) {
            std::map<double, report_detail::GroupStat> groups;
            for (const Row& r : rows) {
                const double key = by_fps ? r.fps : r.t_scan;
                auto& g = groups[key];
                g.key = key;
                if (r.mae_x) {
                    g.sum_x += *r.mae_x;
                    ++g.n_x;
                }
                if (r.mae_y) {
                    g.sum_y += *r.mae_y;
                    ++g.n_y;
                }
            }
            return groups;
        };
        auto emit = [&](bool by_fps, const std::string& csv_name, const std::string& svg_name,
                        const std::string& key_col, const std::string& title,
                        const std::string& x_label) {
            const auto groups = grouped(by_fps);
            std::string csv = key_col + ",n_logs,mean_mae_x_deg,mean_mae_y_deg\n";
            PlotSeries sx{"X error", {}, {}};
            PlotSeries sy{"Y error", {}, {}};
            for (const auto& [key, g] : groups) {
                csv += fmt_double(key) + ',' +
                       fmt_int(static_cast<std::int64_t>(std::max(g.n_x, g.n_y))) + ',';
                csv += g.n_x ? fmt_double(g.sum_x / g.n_x) : "";
                csv += ',';
                csv += g.n_y ? fmt_double(g.sum_y / g.n_y) : "";
                csv += '\n';
                if (g.n_x) {
                    sx.x.push_back(key);
                    sx.y.push_back(g.sum_x / g.n_x);
                }
                if (g.n_y) {
                    sy.x.push_back(key);
                    sy.y.push_back(g.sum_y / g.n_y);
                }
            }
            atomic_write(out_dir / "report" / csv_name, csv);
            written.push_back(csv_name);
            Plot plot;
            plot.title = title;
            plot.x_label = x_label;
            plot.y_label = "mean abs error (deg)";
            if (!sx.x.empty()) plot.series.push_back(sx);
            if (!sy.x.empty()) plot.series.push_back(sy);
            if (!plot.series.empty()) {
                atomic_write(out_dir / "report" / svg_name, render_svg(plot));
                written.push_back(svg_name);
            }
        };
        emit(true, "error_by_fps.csv", "error_vs_fps.svg", "fps", "Gaze error vs frame rate",
             "target FPS");
        emit(false, "error_by_scan_time.csv", "error_vs_scan_time.svg", "t_scan_s",
             "Gaze error vs scan time", "scan time (s)");
    } else {
        missing.push_back("infer_summary.csv (run the infer subcommand)");
    }

    // F1 vs window length from the detector study
    const fs::path study_path = out_dir / "window_study.csv";
    if (fs::exists(study_path)) {
        const std::string text = read_file(study_path);
        const auto lines = csv_lines(text);
        std::string csv = "window_len_s,n_windows,precision,recall,f1\n";
        PlotSeries f1s{"k-means F1", {}, {}};
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const auto f = split_csv_line(lines[i]);
            if (f.size() != 6) continue;
            csv += std::string(f[0]) + ',' + std::string(f[1]) + ',' + std::string(f[3]) + ',' +
                   std::string(f[4]) + ',' + std::string(f[5]) + '\n';
            if (!f[5].empty()) {
                f1s.x.push_back(parse_double(f[0], "window_len_s"));
                f1s.y.push_back(parse_double(f[5], "f1"));
            }
        }
        atomic_write(out_dir / "report" / "f1_by_window.csv", csv);
        written.push_back("f1_by_window.csv");
        if (!f1s.x.empty()) {
            Plot plot;
            plot.title = "Detection F1 vs window length";
            plot.x_label = "window length (s)";
            plot.y_label = "F1";
            plot.series.push_back(f1s);
            atomic_write(out_dir / "report" / "f1_vs_window.svg", render_svg(plot));
            written.push_back("f1_vs_window.svg");
        }
    } else {
        missing.push_back("window_study.csv (run the detect subcommand with study_lengths)");
    }

    // Predicted vs true gaze for the first predicted session
    std::optional<fs::path> pred_path;
    if (fs::exists(out_dir / "sessions.csv")) {
        for (const ManifestRow& row : read_manifest(out_dir)) {
            const fs::path p = out_dir / "predictions" / ("pred_" + row.filename);
            if (fs::exists(p)) {
                pred_path = p;
                break;
            }
        }
    }
    if (!pred_path && fs::exists(out_dir / "predictions")) {
        std::vector<fs::path> preds;
        for (const auto& entry : fs::directory_iterator(out_dir / "predictions")) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("pred_", 0) == 0) preds.push_back(entry.path());
        }
        std::sort(preds.begin(), preds.end());
        if (!preds.empty()) pred_path = preds.front();
    }
    if (pred_path) {
        const std::string text = read_file(*pred_path);
        const auto lines = csv_lines(text);
        PlotSeries px{"pred X", {}, {}}, gx{"true X", {}, {}};
        PlotSeries py{"pred Y", {}, {}}, gy{"true Y", {}, {}};
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const auto f = split_csv_line(lines[i]);
            if (f.size() != 7) continue;
            const double t = parse_double(f[0], "t_s");
            px.x.push_back(t);
            px.y.push_back(parse_double(f[1], "pred_x_deg"));
            py.x.push_back(t);
            py.y.push_back(parse_double(f[2], "pred_y_deg"));
            if (!f[3].empty()) {
                gx.x.push_back(t);
                gx.y.push_back(parse_double(f[3], "gt_x_deg"));
            }
            if (!f[4].empty()) {
                gy.x.push_back(t);
                gy.y.push_back(parse_double(f[4], "gt_y_deg"));
            }
        }
        if (!px.x.empty()) {
            Plot plot;
            plot.title = "Predicted vs true gaze: " + pred_path->filename().string();
            plot.x_label = "time (s)";
            plot.y_label = "gaze angle (deg)";
            plot.series.push_back(px);
            if (!gx.x.empty()) plot.series.push_back(gx);
            plot.series.push_back(py);
            if (!gy.x.empty()) plot.series.push_back(gy);
            atomic_write(out_dir / "report" / "gaze_trace.svg", render_svg(plot));
            written.push_back("gaze_trace.svg");
        }
    } else {
        missing.push_back("predictions/pred_*.csv (run the infer subcommand)");
    }

    std::cout << "report: wrote " << written.size() << " files under "
              << (out_dir / "report").string() << "\n";
    for (const std::string& m : missing) std::cout << "report: missing input: " << m << "\n";
    return 0;
}

} // namespace gazelab
