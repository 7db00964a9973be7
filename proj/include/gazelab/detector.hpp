#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "gazelab/error.hpp"
#include "gazelab/inference.hpp"
#include "gazelab/rng.hpp"
#include "gazelab/trace.hpp"

namespace gazelab {

struct DetectorConfig {
    double window_len_s = 1.0;
    int sg_window = 15;
    int sg_order = 5;
    double outlier_threshold = 0.02; // fraction of the window mean
};

/// Shape summary of one smoothed metric window. Feature order in vector
/// form: sd, skewness, kurtosis, range, iqr, outlier_prop.
struct WindowFeatures {
    double sd = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0; // excess
    double range = 0.0;
    double iqr = 0.0;
    double outlier_prop = 0.0;

    std::array<double, 6> as_array() const {
        return {sd, skewness, kurtosis, range, iqr, outlier_prop};
    }
};

inline constexpr std::size_t kFeatureCount = 6;
inline constexpr const char* kFeatureNames[kFeatureCount] = {"sd",    "skew", "kurtosis",
                                                             "range", "iqr",  "outlier_prop"};

/// Linear-interpolated quantile on a sorted copy (index h = (n-1)*q).
inline double quantile(std::vector<double> sorted_copy, double q) {
    std::sort(sorted_copy.begin(), sorted_copy.end());
    const double h = (sorted_copy.size() - 1) * q;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= sorted_copy.size()) return sorted_copy.back();
    return sorted_copy[lo] + frac * (sorted_copy[lo + 1] - sorted_copy[lo]);
}

/// SG-smooths the window, then computes population moments, range, IQR,
/// and the fraction of samples outside the relative band
/// |v - mean| > threshold*|mean|. Conventions for degenerate windows:
/// zero SD makes skewness and kurtosis 0, and a near-zero mean switches
/// the outlier band to threshold*sd (a relative band around 0 is
/// meaningless; real frame metrics are bounded away from 0).
inline WindowFeatures extract_features(const std::vector<double>& window,
                                       const DetectorConfig& cfg) {
    if (window.size() < static_cast<std::size_t>(cfg.sg_window)) {
        throw Error(ErrorCode::WindowTooShort, "window shorter than the detector SG window");
    }
    const std::vector<double> s = smooth_sg(window, cfg.sg_window, cfg.sg_order);
    const double n = static_cast<double>(s.size());

    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : s) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    WindowFeatures f;
    f.sd = std::sqrt(m2);
    if (f.sd > 1e-12 * (1.0 + std::abs(mean))) {
        f.skewness = m3 / (f.sd * f.sd * f.sd);
        f.kurtosis = m4 / (m2 * m2) - 3.0;
    }
    const auto [mn, mx] = std::minmax_element(s.begin(), s.end());
    f.range = *mx - *mn;
    f.iqr = quantile(s, 0.75) - quantile(s, 0.25);

    const double band = std::abs(mean) < 1e-9 ? cfg.outlier_threshold * f.sd
                                              : cfg.outlier_threshold * std::abs(mean);
    std::size_t outliers = 0;
    for (double v : s) {
        if (std::abs(v - mean) > band) ++outliers;
    }
    f.outlier_prop = static_cast<double>(outliers) / n;
    return f;
}

// ---------------------------------------------------------------------------
// Shared helpers

struct Standardizer {
    std::vector<double> means;
    std::vector<double> scales; // population SD, or 1 where the SD is 0

    std::vector<double> apply(const std::vector<double>& row) const {
        std::vector<double> out(row.size());
        for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - means[j]) / scales[j];
        return out;
    }
};

inline Standardizer fit_standardizer(const std::vector<std::vector<double>>& rows) {
    const std::size_t dim = rows.front().size();
    Standardizer st;
    st.means.assign(dim, 0.0);
    st.scales.assign(dim, 0.0);
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < dim; ++j) st.means[j] += r[j];
    }
    for (double& m : st.means) m /= static_cast<double>(rows.size());
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = r[j] - st.means[j];
            st.scales[j] += d * d;
        }
    }
    for (double& sc : st.scales) {
        sc = std::sqrt(sc / static_cast<double>(rows.size()));
        if (sc <= 0.0) sc = 1.0;
    }
    return st;
}

struct DetectionMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

/// Confusion-matrix scores; any zero denominator yields 0.
inline DetectionMetrics evaluate_detector(const std::vector<int>& predicted,
                                          const std::vector<int>& labels) {
    if (predicted.size() != labels.size()) {
        throw Error(ErrorCode::LengthMismatch, "prediction and label counts differ");
    }
    DetectionMetrics m;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] && labels[i]) ++m.tp;
        else if (predicted[i] && !labels[i]) ++m.fp;
        else if (!predicted[i] && labels[i]) ++m.fn;
        else ++m.tn;
    }
    m.precision = m.tp + m.fp ? static_cast<double>(m.tp) / (m.tp + m.fp) : 0.0;
    m.recall = m.tp + m.fn ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0.0;
    m.f1 = m.precision + m.recall > 0.0 ? 2 * m.precision * m.recall / (m.precision + m.recall)
                                        : 0.0;
    return m;
}

// ---------------------------------------------------------------------------
// Logistic regression

struct LogisticModel {
    std::vector<std::size_t> feature_idx; // columns of the six-feature vector in use
    std::vector<double> weights;
    double bias = 0.0;
    Standardizer standardizer;

    double score(const std::array<double, kFeatureCount>& features) const {
        double z = bias;
        for (std::size_t j = 0; j < feature_idx.size(); ++j) {
            const double v = (features[feature_idx[j]] - standardizer.means[j]) /
                             standardizer.scales[j];
            z += weights[j] * v;
        }
        return 1.0 / (1.0 + std::exp(-z));
    }
    int classify(const std::array<double, kFeatureCount>& features) const {
        return score(features) >= 0.5 ? 1 : 0;
    }
};

struct LogisticFit {
    LogisticModel model;
    DetectionMetrics test;
    double final_loss = 0.0;
    std::size_t iterations = 0;
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
};

/// log(1 + e^a) without overflow.
inline double softplus(double a) {
    return std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a)));
}

struct LogisticOptions {
    double train_fraction = 0.7;
    double l2 = 1e-3;
    double grad_tol = 1e-6;
    std::size_t max_iters = 10000;
    double weight_pos = 1.0; // per-class loss weights, for imbalanced data
    double weight_neg = 1.0;
};

/// Fits L2-regularized logistic regression by full-batch gradient descent
/// with Armijo backtracking (the loss never increases across steps). The
/// split is stratified per class with a seeded shuffle; features are
/// standardized on the training split only. `feature_idx` selects which
/// of the six features the model sees.
inline LogisticFit train_logistic(const std::vector<WindowFeatures>& features,
                                  const std::vector<int>& labels,
                                  const std::vector<std::size_t>& feature_idx, std::uint64_t seed,
                                  const LogisticOptions& opt = {}) {
    if (features.size() != labels.size()) {
        throw Error(ErrorCode::LengthMismatch, "feature and label counts differ");
    }
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty()) {
        throw Error(ErrorCode::SingleClass, "training data must contain both classes");
    }

    // Stratified split: shuffle each class, put the first ~70% in train,
    // clamped so both splits keep at least one sample per class.
    Rng rng(seed);
    auto shuffle = [&rng](std::vector<std::size_t>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[rng.next_below(i)]);
        }
    };
    shuffle(pos);
    shuffle(neg);
    LogisticFit fit;
    auto take = [&](const std::vector<std::size_t>& cls) {
        std::size_t n_train = static_cast<std::size_t>(
            std::floor(opt.train_fraction * static_cast<double>(cls.size()) + 0.5));
        n_train = std::clamp<std::size_t>(n_train, 1, cls.size() - 1);
        for (std::size_t i = 0; i < cls.size(); ++i) {
            (i < n_train ? fit.train_idx : fit.test_idx).push_back(cls[i]);
        }
    };
    take(pos);
    take(neg);
    std::sort(fit.train_idx.begin(), fit.train_idx.end());
    std::sort(fit.test_idx.begin(), fit.test_idx.end());

    std::vector<std::vector<double>> x_train;
    for (std::size_t i : fit.train_idx) {
        const auto arr = features[i].as_array();
        std::vector<double> row;
        for (std::size_t j : feature_idx) row.push_back(arr[j]);
        x_train.push_back(std::move(row));
    }
    const Standardizer st = fit_standardizer(x_train);
    for (auto& row : x_train) row = st.apply(row);

    const std::size_t dim = feature_idx.size();
    const std::size_t n = x_train.size();
    std::vector<double> w(dim, 0.0);
    double b = 0.0;

    auto loss_at = [&](const std::vector<double>& wv, double bv) {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = bv;
            for (std::size_t j = 0; j < dim; ++j) z += wv[j] * x_train[i][j];
            const int y = labels[fit.train_idx[i]];
            const double cw = y ? opt.weight_pos : opt.weight_neg;
            // y=1 contributes softplus(-z), y=0 contributes softplus(z)
            loss += cw * softplus(y ? -z : z);
        }
        loss /= static_cast<double>(n);
        for (double wj : wv) loss += 0.5 * opt.l2 * wj * wj; // bias unregularized
        return loss;
    };

    double loss = loss_at(w, b);
    std::size_t iter = 0;
    for (; iter < opt.max_iters; ++iter) {
        std::vector<double> gw(dim, 0.0);
        double gb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = b;
            for (std::size_t j = 0; j < dim; ++j) z += w[j] * x_train[i][j];
            const double p = 1.0 / (1.0 + std::exp(-z));
            const int y = labels[fit.train_idx[i]];
            const double cw = y ? opt.weight_pos : opt.weight_neg;
            const double g = cw * (p - y);
            for (std::size_t j = 0; j < dim; ++j) gw[j] += g * x_train[i][j];
            gb += g;
        }
        for (std::size_t j = 0; j < dim; ++j) {
            gw[j] = gw[j] / static_cast<double>(n) + opt.l2 * w[j];
        }
        gb /= static_cast<double>(n);

        double gnorm2 = gb * gb;
        for (double g : gw) gnorm2 += g * g;
        if (std::sqrt(gnorm2) < opt.grad_tol) break;

        double step = 1.0;
        for (int half = 0; half < 60; ++half) {
            std::vector<double> w2(dim);
            for (std::size_t j = 0; j < dim; ++j) w2[j] = w[j] - step * gw[j];
            const double b2 = b - step * gb;
            const double l2v = loss_at(w2, b2);
            if (l2v <= loss - 0.5 * step * gnorm2) {
                w = std::move(w2);
                b = b2;
                loss = l2v;
                break;
            }
            step /= 2.0;
        }
    }

    fit.model.feature_idx = feature_idx;
    fit.model.weights = w;
    fit.model.bias = b;
    fit.model.standardizer = st;
    fit.final_loss = loss;
    fit.iterations = iter;

    std::vector<int> pred, truth;
    for (std::size_t i : fit.test_idx) {
        pred.push_back(fit.model.classify(features[i].as_array()));
        truth.push_back(labels[i]);
    }
    fit.test = evaluate_detector(pred, truth);
    return fit;
}

inline std::vector<std::size_t> all_features() { return {0, 1, 2, 3, 4, 5}; }
inline std::vector<std::size_t> two_features() { return {0, 5}; } // sd, outlier_prop

// ---------------------------------------------------------------------------
// K-means

struct KMeansModel {
    std::vector<std::vector<double>> centroids; // in standardized feature space
    Standardizer standardizer;
    std::size_t attack_cluster = 0;
    std::vector<double> objective_history; // sum of squared distances per Lloyd pass

    std::size_t nearest(const std::vector<double>& std_row) const {
        std::size_t best = 0;
        double best_d = 0.0;
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            double d = 0.0;
            for (std::size_t j = 0; j < std_row.size(); ++j) {
                const double diff = std_row[j] - centroids[c][j];
                d += diff * diff;
            }
            if (c == 0 || d < best_d) {
                best_d = d;
                best = c;
            }
        }
        return best;
    }
    int classify(const WindowFeatures& f) const {
        const auto arr = f.as_array();
        const std::vector<double> row(arr.begin(), arr.end());
        return nearest(standardizer.apply(row)) == attack_cluster ? 1 : 0;
    }
};

/// Seeded k-means++ then Lloyd iterations on standardized features, to an
/// assignment fixpoint or 300 passes. The cluster whose centroid has the
/// higher outlier proportion is labeled attack (higher SD on a tie). An
/// emptied cluster is refilled with the point farthest from its centroid.
inline KMeansModel fit_kmeans(const std::vector<WindowFeatures>& features, std::size_t k,
                              std::uint64_t seed) {
    std::vector<std::vector<double>> raw;
    for (const WindowFeatures& f : features) {
        const auto arr = f.as_array();
        raw.emplace_back(arr.begin(), arr.end());
    }
    std::vector<std::vector<double>> distinct = raw;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < k) {
        throw Error(ErrorCode::DegenerateData, "k-means needs at least k distinct points");
    }

    KMeansModel model;
    model.standardizer = fit_standardizer(raw);
    std::vector<std::vector<double>> x;
    for (const auto& r : raw) x.push_back(model.standardizer.apply(r));
    const std::size_t n = x.size();
    const std::size_t dim = x.front().size();

    auto dist2 = [dim](const std::vector<double>& a, const std::vector<double>& b) {
        double d = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double diff = a[j] - b[j];
            d += diff * diff;
        }
        return d;
    };

    // k-means++: first centroid uniform, the rest D^2-weighted.
    Rng rng(seed);
    std::vector<std::vector<double>> centroids;
    centroids.push_back(x[rng.next_below(n)]);
    std::vector<double> d2(n);
    while (centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = dist2(x[i], centroids[0]);
            for (std::size_t c = 1; c < centroids.size(); ++c) {
                best = std::min(best, dist2(x[i], centroids[c]));
            }
            d2[i] = best;
            total += best;
        }
        std::size_t chosen = n - 1; // fallback if rounding keeps acc below r
        if (total > 0.0) {
            const double r = rng.next_unit() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= r) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = rng.next_below(n);
        }
        centroids.push_back(x[chosen]);
    }

    std::vector<std::size_t> assign(n, 0);
    for (std::size_t pass = 0; pass < 300; ++pass) {
        bool changed = pass == 0;
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = dist2(x[i], centroids[0]);
            for (std::size_t c = 1; c < k; ++c) {
                const double d = dist2(x[i], centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            objective += best_d;
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        model.objective_history.push_back(objective);
        if (!changed && pass > 0) break;

        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < dim; ++j) sums[assign[i]][j] += x[i][j];
            ++counts[assign[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Move the point farthest from its centroid into the empty cluster.
                std::size_t far_i = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = dist2(x[i], centroids[assign[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far_i = i;
                    }
                }
                centroids[c] = x[far_i];
            } else {
                for (std::size_t j = 0; j < dim; ++j) {
                    centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
                }
            }
        }
    }
    model.centroids = std::move(centroids);

    // Attack cluster: higher outlier_prop centroid, higher sd on ties.
    // Standardized coordinates preserve the ordering (scales are positive).
    const std::size_t op = kFeatureCount - 1;
    std::size_t attack = 0;
    for (std::size_t c = 1; c < k; ++c) {
        const double d_op = model.centroids[c][op] - model.centroids[attack][op];
        if (d_op > 0.0 || (d_op == 0.0 && model.centroids[c][0] > model.centroids[attack][0])) {
            attack = c;
        }
    }
    model.attack_cluster = attack;
    return model;
}

// ---------------------------------------------------------------------------
// Windowing and the window-length study

/// One feature window cut from a session log.
struct LabeledWindow {
    double start_s = 0.0;
    double len_s = 0.0;
    WindowFeatures features;
    int label = 0; // 1 when probe motion covers >= 50% of the window
    std::size_t log_index = 0;
};

/// Slices a log's metric stream into non-overlapping windows of `len_s`,
/// starting at the log's first timestamp. A window is positive when the
/// probe was in motion (|delta angle| > 1e-9 between consecutive frames)
/// for at least half the window's duration. Windows with fewer samples
/// than the detector's SG window are dropped.
inline std::vector<LabeledWindow> cut_windows(const SessionLog& log, double len_s,
                                              const DetectorConfig& cfg,
                                              std::size_t log_index = 0) {
    if (len_s <= 0.0) throw Error(ErrorCode::ConfigError, "window length must be positive");
    std::vector<LabeledWindow> out;
    const double t0 = log.records.front().t_s;
    const double t_end = log.records.back().t_s;
    std::size_t i = 0;
    for (std::size_t win = 0; t0 + static_cast<double>(win) * len_s < t_end; ++win) {
        const double start = t0 + static_cast<double>(win) * len_s;
        const double stop = start + len_s;
        std::vector<double> metric;
        double motion_s = 0.0;
        std::size_t first = i;
        while (i < log.records.size() && log.records[i].t_s < stop) {
            metric.push_back(log.records[i].metric);
            ++i;
        }
        for (std::size_t j = first; j + 1 < i; ++j) {
            const FrameRecord& a = log.records[j];
            const FrameRecord& b = log.records[j + 1];
            if (std::abs(b.hco_angle_deg - a.hco_angle_deg) > 1e-9) motion_s += b.t_s - a.t_s;
        }
        if (metric.size() < static_cast<std::size_t>(cfg.sg_window)) continue;
        LabeledWindow w;
        w.start_s = start;
        w.len_s = len_s;
        w.features = extract_features(metric, cfg);
        w.label = motion_s >= 0.5 * len_s ? 1 : 0;
        w.log_index = log_index;
        out.push_back(w);
    }
    return out;
}

inline std::vector<LabeledWindow> cut_windows(const std::vector<SessionLog>& logs, double len_s,
                                              const DetectorConfig& cfg) {
    std::vector<LabeledWindow> out;
    for (std::size_t li = 0; li < logs.size(); ++li) {
        auto ws = cut_windows(logs[li], len_s, cfg, li);
        out.insert(out.end(), ws.begin(), ws.end());
    }
    return out;
}

struct WindowStudyRow {
    double window_len_s = 0.0;
    std::size_t n_windows = 0;
    std::size_t n_positive = 0;
    double precision = 0.0;
    double recall = 0.0;
    std::optional<double> f1; // empty when undefined (no positives present)
};

/// Fits a fresh 2-means detector at each window length and scores it
/// against the motion labels. Lengths yielding fewer than two usable
/// windows, or windows of a single class where F1 is undefined, are
/// reported with an empty F1 (precision still reported; it is 1 only
/// when nothing was falsely flagged).
inline std::vector<WindowStudyRow> window_length_study(const std::vector<SessionLog>& logs,
                                                       const std::vector<double>& lengths,
                                                       const DetectorConfig& base_cfg,
                                                       std::uint64_t seed) {
    std::vector<WindowStudyRow> rows;
    for (double len : lengths) {
        DetectorConfig cfg = base_cfg;
        cfg.window_len_s = len;
        const std::vector<LabeledWindow> windows = cut_windows(logs, len, cfg);
        WindowStudyRow row;
        row.window_len_s = len;
        row.n_windows = windows.size();
        for (const LabeledWindow& w : windows) row.n_positive += w.label;
        // Until a detector makes predictions nothing is falsely flagged,
        // so precision starts vacuously at 1; a fitted detector replaces it.
        row.precision = 1.0;
        if (windows.size() >= 2) {
            std::vector<WindowFeatures> feats;
            std::vector<int> labels;
            for (const LabeledWindow& w : windows) {
                feats.push_back(w.features);
                labels.push_back(w.label);
            }
            try {
                const KMeansModel km = fit_kmeans(feats, 2, seed);
                std::vector<int> pred;
                for (const WindowFeatures& f : feats) pred.push_back(km.classify(f));
                const DetectionMetrics m = evaluate_detector(pred, labels);
                row.precision = m.fp == 0 && m.tp == 0 ? 1.0 : m.precision;
                row.recall = m.recall;
                if (row.n_positive > 0) row.f1 = m.f1;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::DegenerateData) throw;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace gazelab
