#include <catch2/catch_amalgamated.hpp>

#include "gazelab/foveation.hpp"
#include "gazelab/rng.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace gazelab;

namespace {

// Per-cell reference for overlap_weights: count every cell whose center
// lies inside the rectangle; an empty selection falls back to the cell
// holding the rectangle midpoint, mirroring the production rule.
OverlapWeights overlap_brute_force(const RectDeg& rect, const ShadingRateMap& map,
                                   const FoveationConfig& cfg) {
    std::array<std::size_t, 3> counts{0, 0, 0};
    for (int row = 0; row < cfg.map_h; ++row) {
        for (int col = 0; col < cfg.map_w; ++col) {
            const double cx = cell_center_x_deg(col, cfg);
            const double cy = cell_center_y_deg(row, cfg);
            if (cx >= rect.x_min && cx <= rect.x_max && cy >= rect.y_min && cy <= rect.y_max) {
                ++counts[static_cast<std::size_t>(map.at(col, row))];
            }
        }
    }
    if (counts[0] + counts[1] + counts[2] == 0) {
        const double mx = (rect.x_min + rect.x_max) / 2;
        const double my = (rect.y_min + rect.y_max) / 2;
        const int col = std::clamp(
            static_cast<int>(round_half_up((mx / cfg.fov_x_deg + 0.5) * (cfg.map_w - 1))), 0,
            cfg.map_w - 1);
        const int row = std::clamp(
            static_cast<int>(round_half_up((-my / cfg.fov_y_deg + 0.5) * (cfg.map_h - 1))), 0,
            cfg.map_h - 1);
        counts[static_cast<std::size_t>(map.at(col, row))] = 1;
    }
    const double total = static_cast<double>(counts[0] + counts[1] + counts[2]);
    return OverlapWeights{counts[0] / total, counts[1] / total, counts[2] / total};
}

std::size_t count_region(const ShadingRateMap& map, Region r) {
    std::size_t n = 0;
    for (Region g : map.grid) n += (g == r) ? 1 : 0;
    return n;
}

} // namespace

TEST_CASE("angle_to_cell maps the view center to the center cell", "[foveation]") {
    const FoveationConfig cfg;
    const Cell c = angle_to_cell(0.0, 0.0, cfg);
    REQUIRE(c.col == 96);
    REQUIRE(c.row == 54);
}

TEST_CASE("angle_to_cell maps the left view edge to column zero", "[foveation]") {
    const FoveationConfig cfg;
    const Cell c = angle_to_cell(-53.76, 0.0, cfg);
    REQUIRE(c.col == 0);
    REQUIRE(c.row == 54);
}

TEST_CASE("angle_to_cell agrees with a nearest-center search over all cells", "[foveation]") {
    const FoveationConfig cfg;
    const double gx = 10.0, gy = -5.0;
    const Cell got = angle_to_cell(gx, gy, cfg);

    int best_col = 0, best_row = 0;
    double best_d = 1e300;
    for (int row = 0; row < cfg.map_h; ++row) {
        for (int col = 0; col < cfg.map_w; ++col) {
            const double dx = cell_center_x_deg(col, cfg) - gx;
            const double dy = cell_center_y_deg(row, cfg) - gy;
            const double d = dx * dx + dy * dy;
            if (d < best_d) {
                best_d = d;
                best_col = col;
                best_row = row;
            }
        }
    }
    REQUIRE(got.col == best_col);
    REQUIRE(got.row == best_row);
}

TEST_CASE("angle_to_cell rejects angles outside the view", "[foveation]") {
    const FoveationConfig cfg;
    try {
        angle_to_cell(60.0, 0.0, cfg);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::OutOfFov);
    }
}

TEST_CASE("build_map centered gaze matches a per-cell disk count", "[foveation]") {
    const FoveationConfig cfg;
    const ShadingRateMap map = build_map(0.0, 0.0, cfg);

    std::size_t expected = 0;
    for (int row = 0; row < cfg.map_h; ++row) {
        for (int col = 0; col < cfg.map_w; ++col) {
            const double dc = col - 96;
            const double dr = row - 54;
            if (std::sqrt(dc * dc + dr * dr) <= 10.5) ++expected;
        }
    }
    REQUIRE(count_region(map, Region::Fovea) == expected);
    REQUIRE(map.grid.size() == static_cast<std::size_t>(cfg.map_w) * cfg.map_h);
}

TEST_CASE("build_map clips the foveal disk at a view corner", "[foveation]") {
    const FoveationConfig cfg;
    const ShadingRateMap map = build_map(-53.76, -37.5, cfg);

    std::size_t expected = 0;
    for (int row = 0; row < cfg.map_h; ++row) {
        for (int col = 0; col < cfg.map_w; ++col) {
            const double dc = col - 0;
            const double dr = row - 107;
            if (std::sqrt(dc * dc + dr * dr) <= 10.5) ++expected;
        }
    }
    // Roughly a quarter disk survives the clip; every counted cell is a
    // real grid cell by construction.
    REQUIRE(count_region(map, Region::Fovea) == expected);
    REQUIRE(expected < 120);
}

TEST_CASE("a one-cell foveal diameter yields exactly one fovea cell", "[foveation]") {
    FoveationConfig cfg;
    cfg.foveal_diameter_cells = 1.0;
    const ShadingRateMap map = build_map(0.0, 0.0, cfg);
    REQUIRE(count_region(map, Region::Fovea) == 1);
}

TEST_CASE("map_sequence holds a constant gaze as identical maps", "[foveation]") {
    const FoveationConfig cfg;
    const std::vector<GazePoint> trace = {{0.0, 3.0, -2.0}, {1.0, 3.0, -2.0}};
    const auto seq = map_sequence(trace, cfg);
    REQUIRE(seq.size() == 100);
    for (const auto& [t, map] : seq) {
        REQUIRE(map.grid == seq.front().second.grid);
    }
}

TEST_CASE("map_sequence applies a gaze step at the next update tick", "[foveation]") {
    const FoveationConfig cfg;
    const std::vector<GazePoint> trace = {{0.0, -20.0, 0.0}, {0.5, 20.0, 0.0}, {1.0, 20.0, 0.0}};
    const auto seq = map_sequence(trace, cfg);
    REQUIRE(seq.size() == 100);
    REQUIRE(seq[49].second.gaze_x_deg == -20.0);
    REQUIRE(seq[50].second.gaze_x_deg == 20.0);
}

TEST_CASE("map_sequence tick count covers the trace duration", "[foveation]") {
    const FoveationConfig cfg;
    std::vector<GazePoint> trace;
    for (int i = 0; i <= 73; ++i) trace.push_back({i * 0.01, 0.0, 0.0});
    REQUIRE(map_sequence(trace, cfg).size() == 73);
}

TEST_CASE("overlap far from gaze is pure periphery", "[foveation]") {
    const FoveationConfig cfg;
    const ShadingRateMap map = build_map(-40.0, -30.0, cfg);
    const RectDeg rect{40.0, 50.0, 20.0, 35.0};
    const OverlapWeights w = overlap_weights(rect, map, cfg);
    REQUIRE(w.fovea == 0.0);
    REQUIRE(w.perifovea == 0.0);
    REQUIRE(w.periphery == 1.0);
}

TEST_CASE("a full-view rectangle reproduces the region area shares", "[foveation]") {
    const FoveationConfig cfg;
    const ShadingRateMap map = build_map(0.0, 0.0, cfg);
    const RectDeg rect{-53.76, 53.76, -37.5, 37.5};
    const OverlapWeights w = overlap_weights(rect, map, cfg);
    const double total = static_cast<double>(cfg.map_w) * cfg.map_h;
    REQUIRE(w.fovea == static_cast<double>(count_region(map, Region::Fovea)) / total);
    REQUIRE(w.perifovea == static_cast<double>(count_region(map, Region::Perifovea)) / total);
    REQUIRE(w.periphery == static_cast<double>(count_region(map, Region::Periphery)) / total);
}

TEST_CASE("a probe strip over the gaze matches the per-cell overlap count", "[foveation]") {
    const FoveationConfig cfg;
    const double gx = 7.0;
    const ShadingRateMap map = build_map(gx, -4.0, cfg);
    const RectDeg rect{gx - 2.65, gx + 2.65, -37.5, 37.5};
    const OverlapWeights got = overlap_weights(rect, map, cfg);
    const OverlapWeights want = overlap_brute_force(rect, map, cfg);
    REQUIRE(got.fovea == want.fovea);
    REQUIRE(got.perifovea == want.perifovea);
    REQUIRE(got.periphery == want.periphery);
}

TEST_CASE("overlap matches per-cell enumeration on random placements", "[foveation]") {
    const FoveationConfig cfg;
    Rng rng(20240811);
    for (int i = 0; i < 30; ++i) {
        const double gx = (rng.next_unit() - 0.5) * cfg.fov_x_deg;
        const double gy = (rng.next_unit() - 0.5) * cfg.fov_y_deg;
        const ShadingRateMap map = build_map(gx, gy, cfg);

        double w = 0.0, h = 0.0, cx = 0.0, cy = 0.0;
        if (i % 5 == 0) {
            // Sub-cell rectangles exercise the midpoint fallback.
            w = 0.05 + 0.2 * rng.next_unit();
            h = 0.05 + 0.2 * rng.next_unit();
        } else {
            w = 2.0 + 30.0 * rng.next_unit();
            h = 2.0 + 25.0 * rng.next_unit();
        }
        cx = (rng.next_unit() - 0.5) * 1.3 * cfg.fov_x_deg;
        cy = (rng.next_unit() - 0.5) * 1.3 * cfg.fov_y_deg;
        const RectDeg rect{cx - w / 2, cx + w / 2, cy - h / 2, cy + h / 2};

        const OverlapWeights got = overlap_weights(rect, map, cfg);
        const OverlapWeights want = overlap_brute_force(rect, map, cfg);
        REQUIRE(got.fovea == want.fovea);
        REQUIRE(got.perifovea == want.perifovea);
        REQUIRE(got.periphery == want.periphery);
        REQUIRE(std::abs(got.fovea + got.perifovea + got.periphery - 1.0) < 1e-12);
    }
}

TEST_CASE("a zero-area rectangle is rejected", "[foveation]") {
    const FoveationConfig cfg;
    const ShadingRateMap map = build_map(0.0, 0.0, cfg);
    try {
        overlap_weights(RectDeg{1.0, 1.0, -2.0, 2.0}, map, cfg);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::DegenerateRect);
    }
}

TEST_CASE("sample_trace holds the last gaze sample", "[foveation]") {
    const std::vector<GazePoint> trace = {{0.0, 1.0, 0.0}, {0.5, 2.0, 0.0}, {1.0, 3.0, 0.0}};
    REQUIRE(sample_trace(trace, -0.1).x_deg == 1.0);
    REQUIRE(sample_trace(trace, 0.0).x_deg == 1.0);
    REQUIRE(sample_trace(trace, 0.49).x_deg == 1.0);
    REQUIRE(sample_trace(trace, 0.5).x_deg == 2.0);
    REQUIRE(sample_trace(trace, 2.0).x_deg == 3.0);
    try {
        sample_trace({}, 0.0);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::EmptyTrace);
    }
}

TEST_CASE("gaze trace CSV round-trip is byte-identical", "[foveation]") {
    const std::vector<GazePoint> trace = {{0.0, 1.25, -3.5}, {0.4, 2.0, 0.125}};
    const std::string once = serialize_gaze_trace(trace);
    const std::vector<GazePoint> back = parse_gaze_trace(once);
    REQUIRE(back.size() == trace.size());
    REQUIRE(serialize_gaze_trace(back) == once);

    const std::string path = "gaze_roundtrip_tmp.csv";
    write_gaze_trace(path, trace);
    REQUIRE(serialize_gaze_trace(read_gaze_trace(path)) == once);
    std::remove(path.c_str());
}

TEST_CASE("gaze trace parser rejects malformed input", "[foveation]") {
    try {
        parse_gaze_trace("wrong,header\n0,0\n");
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::ParseError);
    }
    try {
        parse_gaze_trace(std::string(kGazeTraceCsvHeader) + "\n");
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::EmptyTrace);
    }
}

TEST_CASE("map_to_pgm emits a plain PGM of region codes", "[foveation]") {
    const FoveationConfig cfg;
    const ShadingRateMap map = build_map(0.0, 0.0, cfg);
    const std::string pgm = map_to_pgm(map);
    REQUIRE(pgm.rfind("P2\n192 108\n2\n", 0) == 0);
    // One single-digit region code per cell after the header.
    std::size_t count = 0;
    bool in_tok = false;
    for (std::size_t i = 13; i < pgm.size(); ++i) {
        const bool digit = pgm[i] >= '0' && pgm[i] <= '2';
        if (digit && !in_tok) ++count;
        in_tok = digit;
    }
    REQUIRE(count == static_cast<std::size_t>(cfg.map_w) * cfg.map_h);
}
