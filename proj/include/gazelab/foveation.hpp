#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gazelab/error.hpp"
#include "gazelab/text.hpp"

namespace gazelab {

enum class Region : std::uint8_t { Fovea = 0, Perifovea = 1, Periphery = 2 };

enum class ShadingRate : std::uint8_t { Rate1x1, Rate2x2, Rate4x4 };

/// Geometry of the emulated shading-rate map. Cell sizes are implied by
/// the FOV extents; the framebuffer dimensions are informational.
struct FoveationConfig {
    int map_w = 192;
    int map_h = 108;
    int framebuffer_w = 1920;
    int framebuffer_h = 1080;
    double foveal_diameter_cells = 21.0;
    double perifoveal_width_cells = 20.0;
    ShadingRate fovea_rate = ShadingRate::Rate1x1;
    ShadingRate perifovea_rate = ShadingRate::Rate2x2;
    ShadingRate periphery_rate = ShadingRate::Rate4x4;
    double update_period_s = 0.010;
    double fov_x_deg = 107.52;
    double fov_y_deg = 75.0;
};

/// Region grid for one gaze point. Row 0 is the top of the screen;
/// positive Y angle is up.
struct ShadingRateMap {
    int map_w = 0;
    int map_h = 0;
    double gaze_x_deg = 0.0;
    double gaze_y_deg = 0.0;
    std::vector<Region> grid; // row-major, map_w * map_h

    Region at(int col, int row) const { return grid[static_cast<std::size_t>(row) * map_w + col]; }
};

struct Cell {
    int col = 0;
    int row = 0;
};

/// Fractions of an HCO rectangle lying over each region, at cell
/// resolution. Always sums to 1.
struct OverlapWeights {
    double fovea = 0.0;
    double perifovea = 0.0;
    double periphery = 0.0;
};

/// Axis-aligned rectangle in view angles (degrees), X right, Y up.
struct RectDeg {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;
};

inline double round_half_up(double v) { return std::floor(v + 0.5); }

/// Column c spans centers from -fov_x/2 (c = 0) to +fov_x/2 (c = map_w-1).
inline double cell_center_x_deg(int col, const FoveationConfig& cfg) {
    return (static_cast<double>(col) / (cfg.map_w - 1) - 0.5) * cfg.fov_x_deg;
}

/// Row 0 is the top (+fov_y/2), row map_h-1 the bottom.
inline double cell_center_y_deg(int row, const FoveationConfig& cfg) {
    return -(static_cast<double>(row) / (cfg.map_h - 1) - 0.5) * cfg.fov_y_deg;
}

inline Cell angle_to_cell(double x_deg, double y_deg, const FoveationConfig& cfg) {
    if (std::abs(x_deg) > cfg.fov_x_deg / 2 || std::abs(y_deg) > cfg.fov_y_deg / 2) {
        throw Error(ErrorCode::OutOfFov, "gaze angle outside the field of view");
    }
    Cell cell;
    cell.col = static_cast<int>(round_half_up((x_deg / cfg.fov_x_deg + 0.5) * (cfg.map_w - 1)));
    cell.row = static_cast<int>(round_half_up((-y_deg / cfg.fov_y_deg + 0.5) * (cfg.map_h - 1)));
    cell.col = std::clamp(cell.col, 0, cfg.map_w - 1);
    cell.row = std::clamp(cell.row, 0, cfg.map_h - 1);
    return cell;
}

/// Builds the region map for one gaze point: a foveal disk of the
/// configured diameter around the gaze cell, a perifoveal ring around it,
/// periphery elsewhere. Membership is by cell-center distance in cell
/// units; disks are clipped at the map edges.
inline ShadingRateMap build_map(double gaze_x_deg, double gaze_y_deg, const FoveationConfig& cfg) {
    Cell center = angle_to_cell(gaze_x_deg, gaze_y_deg, cfg);
    ShadingRateMap map;
    map.map_w = cfg.map_w;
    map.map_h = cfg.map_h;
    map.gaze_x_deg = gaze_x_deg;
    map.gaze_y_deg = gaze_y_deg;
    map.grid.resize(static_cast<std::size_t>(cfg.map_w) * cfg.map_h, Region::Periphery);
    const double r_fovea = cfg.foveal_diameter_cells / 2.0;
    const double r_peri = r_fovea + cfg.perifoveal_width_cells;
    for (int row = 0; row < cfg.map_h; ++row) {
        for (int col = 0; col < cfg.map_w; ++col) {
            const double dc = col - center.col;
            const double dr = row - center.row;
            const double dist = std::sqrt(dc * dc + dr * dr);
            Region region = Region::Periphery;
            if (dist <= r_fovea) {
                region = Region::Fovea;
            } else if (dist <= r_peri) {
                region = Region::Perifovea;
            }
            map.grid[static_cast<std::size_t>(row) * cfg.map_w + col] = region;
        }
    }
    return map;
}

struct GazePoint {
    double t_s = 0.0;
    double x_deg = 0.0;
    double y_deg = 0.0;
};

/// Most recent trace sample at or before `t_s`; clamps to the first sample
/// before the trace starts (zero-order hold).
inline const GazePoint& sample_trace(const std::vector<GazePoint>& trace, double t_s) {
    if (trace.empty()) throw Error(ErrorCode::EmptyTrace, "gaze trace is empty");
    std::size_t lo = 0;
    if (trace[0].t_s <= t_s) {
        std::size_t hi = trace.size();
        while (lo + 1 < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (trace[mid].t_s <= t_s) lo = mid; else hi = mid;
        }
    }
    return trace[lo];
}

/// One map per update tick from t = 0 to the end of the trace, each driven
/// by the most recent gaze sample at or before the tick.
inline std::vector<std::pair<double, ShadingRateMap>> map_sequence(
    const std::vector<GazePoint>& trace, const FoveationConfig& cfg) {
    if (trace.empty()) throw Error(ErrorCode::EmptyTrace, "gaze trace is empty");
    const double duration = trace.back().t_s;
    const std::size_t ticks =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(duration / cfg.update_period_s)));
    std::vector<std::pair<double, ShadingRateMap>> out;
    out.reserve(ticks);
    for (std::size_t i = 0; i < ticks; ++i) {
        const double t = static_cast<double>(i) * cfg.update_period_s;
        const GazePoint& g = sample_trace(trace, t);
        out.emplace_back(t, build_map(g.x_deg, g.y_deg, cfg));
    }
    return out;
}

/// Area fractions of `rect` over each region, counting a cell as inside
/// iff its center lies inside the rectangle. When the rectangle is so
/// small that it contains no cell center, the cell holding its midpoint
/// stands in for it.
inline OverlapWeights overlap_weights(const RectDeg& rect, const ShadingRateMap& map,
                                      const FoveationConfig& cfg) {
    if (!(rect.x_max > rect.x_min) || !(rect.y_max > rect.y_min)) {
        throw Error(ErrorCode::DegenerateRect, "HCO rectangle has zero area");
    }
    // Columns whose center x lies in [x_min, x_max].
    int col_lo = static_cast<int>(std::ceil((rect.x_min / cfg.fov_x_deg + 0.5) * (cfg.map_w - 1) - 1e-9));
    int col_hi = static_cast<int>(std::floor((rect.x_max / cfg.fov_x_deg + 0.5) * (cfg.map_w - 1) + 1e-9));
    // Rows whose center y lies in [y_min, y_max]; row index grows downward.
    int row_lo = static_cast<int>(std::ceil((-rect.y_max / cfg.fov_y_deg + 0.5) * (cfg.map_h - 1) - 1e-9));
    int row_hi = static_cast<int>(std::floor((-rect.y_min / cfg.fov_y_deg + 0.5) * (cfg.map_h - 1) + 1e-9));
    col_lo = std::max(col_lo, 0);
    col_hi = std::min(col_hi, cfg.map_w - 1);
    row_lo = std::max(row_lo, 0);
    row_hi = std::min(row_hi, cfg.map_h - 1);

    std::array<std::size_t, 3> counts{0, 0, 0};
    if (col_lo > col_hi || row_lo > row_hi) {
        const double mx = (rect.x_min + rect.x_max) / 2;
        const double my = (rect.y_min + rect.y_max) / 2;
        Cell cell;
        cell.col = std::clamp(
            static_cast<int>(round_half_up((mx / cfg.fov_x_deg + 0.5) * (cfg.map_w - 1))), 0,
            cfg.map_w - 1);
        cell.row = std::clamp(
            static_cast<int>(round_half_up((-my / cfg.fov_y_deg + 0.5) * (cfg.map_h - 1))), 0,
            cfg.map_h - 1);
        counts[static_cast<std::size_t>(map.at(cell.col, cell.row))] = 1;
    } else {
        for (int row = row_lo; row <= row_hi; ++row) {
            for (int col = col_lo; col <= col_hi; ++col) {
                ++counts[static_cast<std::size_t>(map.at(col, row))];
            }
        }
    }
    const double total = static_cast<double>(counts[0] + counts[1] + counts[2]);
    OverlapWeights w;
    w.fovea = counts[0] / total;
    w.perifovea = counts[1] / total;
    w.periphery = counts[2] / total;
    return w;
}

/// PGM (P2) text dump of the region codes {0,1,2}, for eyeballing maps.
inline std::string map_to_pgm(const ShadingRateMap& map) {
    std::string out = "P2\n";
    out += std::to_string(map.map_w) + " " + std::to_string(map.map_h) + "\n2\n";
    for (int row = 0; row < map.map_h; ++row) {
        for (int col = 0; col < map.map_w; ++col) {
            if (col) out += ' ';
            out += static_cast<char>('0' + static_cast<int>(map.at(col, row)));
        }
        out += '\n';
    }
    return out;
}

inline void write_map_pgm(const std::string& path, const ShadingRateMap& map) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << map_to_pgm(map);
}

// ---------------------------------------------------------------------------
// Gaze-trace CSV (header: t_s,x_deg,y_deg)

inline constexpr std::string_view kGazeTraceCsvHeader = "t_s,x_deg,y_deg";

inline std::string serialize_gaze_trace(const std::vector<GazePoint>& trace) {
    std::string out(kGazeTraceCsvHeader);
    out += '\n';
    for (const GazePoint& g : trace) {
        out += fmt_double(g.t_s);
        out += ',';
        out += fmt_double(g.x_deg);
        out += ',';
        out += fmt_double(g.y_deg);
        out += '\n';
    }
    return out;
}

inline std::vector<GazePoint> parse_gaze_trace(std::string_view text) {
    std::vector<GazePoint> trace;
    std::size_t pos = 0;
    bool saw_header = false;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        if (!saw_header) {
            if (line != kGazeTraceCsvHeader) {
                throw Error(ErrorCode::ParseError, "gaze-trace CSV header mismatch");
            }
            saw_header = true;
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != 3) {
            throw Error(ErrorCode::ParseError,
                        "expected 3 fields at line " + std::to_string(line_no));
        }
        GazePoint g;
        g.t_s = parse_double(fields[0], "t_s");
        g.x_deg = parse_double(fields[1], "x_deg");
        g.y_deg = parse_double(fields[2], "y_deg");
        if (!trace.empty() && g.t_s < trace.back().t_s) {
            throw Error(ErrorCode::ParseError, "gaze trace must be time-sorted");
        }
        trace.push_back(g);
    }
    if (!saw_header) throw Error(ErrorCode::ParseError, "missing gaze-trace CSV header");
    if (trace.empty()) throw Error(ErrorCode::EmptyTrace, "gaze trace has no samples");
    return trace;
}

inline std::vector<GazePoint> read_gaze_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_gaze_trace(buf.str());
}

inline void write_gaze_trace(const std::string& path, const std::vector<GazePoint>& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << serialize_gaze_trace(trace);
}

} // namespace gazelab
