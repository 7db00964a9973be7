#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gazelab/error.hpp"
#include "gazelab/text.hpp"

namespace gazelab {

enum class Axis : std::uint8_t { X, Y };

inline const char* axis_name(Axis axis) { return axis == Axis::X ? "X" : "Y"; }

/// Direction the logged metric moves when GPU load rises: frame time goes
/// up, frame rate goes down.
enum class MetricPolarity : std::uint8_t { LoadIncreasesMetric, LoadDecreasesMetric };

/// One logged frame. `t_s` is seconds since session start, `metric` is the
/// per-frame performance metric (ms for frame time, frames/s for frame
/// rate), `hco_angle_deg` the probe position along the active scan axis.
struct FrameRecord {
    double t_s = 0.0;
    double metric = 0.0;
    double hco_angle_deg = 0.0;
    Axis axis = Axis::X;
    std::int64_t scan_id = 1;
    std::optional<double> gt_x_deg;
    std::optional<double> gt_y_deg;
};

/// Frames of one HCO sweep, in log order. All share scan_id and axis.
struct ScanWindow {
    std::int64_t scan_id = 0;
    Axis axis = Axis::X;
    std::vector<double> t_s;
    std::vector<double> metric;
    std::vector<double> hco_angle_deg;
    std::vector<std::optional<double>> gt_x_deg;
    std::vector<std::optional<double>> gt_y_deg;

    std::size_t size() const { return t_s.size(); }
};

struct GazeSample {
    double t_s = 0.0;
    double x_deg = 0.0;
    double y_deg = 0.0;
};

/// A session log that has passed validate_log. Immutable by convention:
/// every downstream operation takes it by const reference.
struct SessionLog {
    std::vector<FrameRecord> records;
    MetricPolarity polarity = MetricPolarity::LoadIncreasesMetric;
    /// Optional "# generator: <name>" annotation carried through CSV IO.
    std::optional<std::string> generator;
};

/// Checks the per-record invariants and returns the assembled log.
/// Reports the first violating record index on failure.
inline SessionLog validate_log(std::vector<FrameRecord> records, MetricPolarity polarity,
                               std::optional<std::string> generator = std::nullopt) {
    if (records.empty()) {
        throw Error(ErrorCode::TooShort, "session log is empty");
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        const FrameRecord& rec = records[i];
        if (rec.metric <= 0.0) {
            throw Error(ErrorCode::NonPositiveMetric, "metric must be > 0", i);
        }
        if (i == 0) continue;
        const FrameRecord& prev = records[i - 1];
        if (!(rec.t_s > prev.t_s)) {
            throw Error(ErrorCode::NonMonotonicTime, "timestamps must strictly increase", i);
        }
        if (rec.scan_id < prev.scan_id) {
            throw Error(ErrorCode::ScanIdRegression, "scan_id decreased", i);
        }
        if (rec.scan_id == prev.scan_id) {
            if (rec.axis != prev.axis) {
                throw Error(ErrorCode::MixedAxisInScan, "axis changed within a scan", i);
            }
            if (rec.hco_angle_deg < prev.hco_angle_deg) {
                throw Error(ErrorCode::MixedAxisInScan,
                            "hco_angle must be non-decreasing within a scan", i);
            }
        }
    }
    return SessionLog{std::move(records), polarity, std::move(generator)};
}

/// Splits the log into maximal runs of equal scan_id. Windows must
/// alternate X, Y, X, Y, ... starting with X.
inline std::vector<ScanWindow> group_scans(const SessionLog& log) {
    std::vector<ScanWindow> windows;
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        const FrameRecord& rec = log.records[i];
        if (windows.empty() || windows.back().scan_id != rec.scan_id) {
            if (windows.empty()) {
                if (rec.axis != Axis::X) {
                    throw Error(ErrorCode::AxisAlternationViolation,
                                "first scan window must be an X sweep", i);
                }
            } else if (windows.back().axis == rec.axis) {
                throw Error(ErrorCode::AxisAlternationViolation,
                            "consecutive scan windows share an axis", i);
            }
            ScanWindow w;
            w.scan_id = rec.scan_id;
            w.axis = rec.axis;
            windows.push_back(std::move(w));
        }
        ScanWindow& w = windows.back();
        w.t_s.push_back(rec.t_s);
        w.metric.push_back(rec.metric);
        w.hco_angle_deg.push_back(rec.hco_angle_deg);
        w.gt_x_deg.push_back(rec.gt_x_deg);
        w.gt_y_deg.push_back(rec.gt_y_deg);
    }
    return windows;
}

// ---------------------------------------------------------------------------
// Session-log CSV

inline constexpr std::string_view kSessionCsvHeader =
    "t_s,metric,hco_angle_deg,axis,scan_id,gt_x_deg,gt_y_deg";

inline std::string serialize_log(const SessionLog& log) {
    std::string out;
    if (log.generator) {
        out += "# generator: ";
        out += *log.generator;
        out += '\n';
    }
    out += kSessionCsvHeader;
    out += '\n';
    for (const FrameRecord& rec : log.records) {
        out += fmt_double(rec.t_s);
        out += ',';
        out += fmt_double(rec.metric);
        out += ',';
        out += fmt_double(rec.hco_angle_deg);
        out += ',';
        out += axis_name(rec.axis);
        out += ',';
        out += fmt_int(rec.scan_id);
        out += ',';
        if (rec.gt_x_deg) out += fmt_double(*rec.gt_x_deg);
        out += ',';
        if (rec.gt_y_deg) out += fmt_double(*rec.gt_y_deg);
        out += '\n';
    }
    return out;
}

inline SessionLog parse_log(std::string_view text, MetricPolarity polarity) {
    std::vector<FrameRecord> records;
    std::optional<std::string> generator;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        ++line_no;
        if (line.empty()) continue;
        if (line.front() == '#') {
            constexpr std::string_view tag = "# generator: ";
            if (!saw_header && line.substr(0, tag.size()) == tag) {
                generator = std::string(line.substr(tag.size()));
            }
            continue;
        }
        if (!saw_header) {
            if (line != kSessionCsvHeader) {
                throw Error(ErrorCode::ParseError,
                            "session CSV header mismatch at line " + std::to_string(line_no));
            }
            saw_header = true;
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != 7) {
            throw Error(ErrorCode::ParseError,
                        "expected 7 fields at line " + std::to_string(line_no));
        }
        FrameRecord rec;
        rec.t_s = parse_double(fields[0], "t_s");
        rec.metric = parse_double(fields[1], "metric");
        rec.hco_angle_deg = parse_double(fields[2], "hco_angle_deg");
        if (fields[3] == "X") {
            rec.axis = Axis::X;
        } else if (fields[3] == "Y") {
            rec.axis = Axis::Y;
        } else {
            throw Error(ErrorCode::ParseError,
                        "axis must be X or Y at line " + std::to_string(line_no));
        }
        rec.scan_id = parse_int(fields[4], "scan_id");
        if (!fields[5].empty()) rec.gt_x_deg = parse_double(fields[5], "gt_x_deg");
        if (!fields[6].empty()) rec.gt_y_deg = parse_double(fields[6], "gt_y_deg");
        records.push_back(rec);
    }
    if (!saw_header) {
        throw Error(ErrorCode::ParseError, "missing session CSV header");
    }
    return validate_log(std::move(records), polarity, std::move(generator));
}

inline SessionLog read_log(const std::string& path, MetricPolarity polarity) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_log(buf.str(), polarity);
}

inline void write_log(const std::string& path, const SessionLog& log) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << serialize_log(log);
}

} // namespace gazelab
