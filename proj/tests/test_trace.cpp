#include <catch2/catch_amalgamated.hpp>

#include "gazelab/trace.hpp"

#include <vector>

using namespace gazelab;

namespace {

FrameRecord rec(double t, double metric, double angle, Axis axis, std::int64_t scan) {
    FrameRecord r;
    r.t_s = t;
    r.metric = metric;
    r.hco_angle_deg = angle;
    r.axis = axis;
    r.scan_id = scan;
    return r;
}

std::vector<FrameRecord> two_scan_records() {
    return {
        rec(0.00, 100.0, -10.0, Axis::X, 1),
        rec(0.01, 101.0, 0.0, Axis::X, 1),
        rec(0.02, 99.0, -5.0, Axis::Y, 2),
        rec(0.03, 100.5, 5.0, Axis::Y, 2),
    };
}

} // namespace

TEST_CASE("validate_log accepts a well-formed record stream", "[trace]") {
    const SessionLog log =
        validate_log(two_scan_records(), MetricPolarity::LoadDecreasesMetric);
    REQUIRE(log.records.size() == 4);
    REQUIRE(log.polarity == MetricPolarity::LoadDecreasesMetric);
    REQUIRE_FALSE(log.generator.has_value());
}

TEST_CASE("validate_log rejects an empty stream", "[trace]") {
    try {
        validate_log({}, MetricPolarity::LoadIncreasesMetric);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::TooShort);
    }
}

TEST_CASE("validate_log flags repeated timestamps at the offending index", "[trace]") {
    std::vector<FrameRecord> r = {
        rec(0.00, 1.0, 0.0, Axis::X, 1),
        rec(0.01, 1.0, 1.0, Axis::X, 1),
        rec(0.01, 1.0, 2.0, Axis::X, 1),
    };
    try {
        validate_log(r, MetricPolarity::LoadIncreasesMetric);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::NonMonotonicTime);
        REQUIRE(e.index() == 2);
    }
}

TEST_CASE("validate_log flags a scan id regression at the offending index", "[trace]") {
    std::vector<FrameRecord> r = {
        rec(0.00, 1.0, 0.0, Axis::X, 2),
        rec(0.01, 1.0, 1.0, Axis::X, 1),
    };
    try {
        validate_log(r, MetricPolarity::LoadIncreasesMetric);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::ScanIdRegression);
        REQUIRE(e.index() == 1);
    }
}

TEST_CASE("validate_log rejects non-positive metric values", "[trace]") {
    std::vector<FrameRecord> r = {
        rec(0.00, 1.0, 0.0, Axis::X, 1),
        rec(0.01, 0.0, 1.0, Axis::X, 1),
    };
    try {
        validate_log(r, MetricPolarity::LoadIncreasesMetric);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::NonPositiveMetric);
        REQUIRE(e.index() == 1);
    }
}

TEST_CASE("validate_log rejects an axis change inside one scan", "[trace]") {
    std::vector<FrameRecord> r = {
        rec(0.00, 1.0, 0.0, Axis::X, 1),
        rec(0.01, 1.0, 1.0, Axis::Y, 1),
    };
    try {
        validate_log(r, MetricPolarity::LoadIncreasesMetric);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::MixedAxisInScan);
        REQUIRE(e.index() == 1);
    }
}

TEST_CASE("validate_log rejects a probe angle moving backwards inside one scan", "[trace]") {
    std::vector<FrameRecord> r = {
        rec(0.00, 1.0, 5.0, Axis::X, 1),
        rec(0.01, 1.0, 4.0, Axis::X, 1),
    };
    try {
        validate_log(r, MetricPolarity::LoadIncreasesMetric);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::MixedAxisInScan);
        REQUIRE(e.index() == 1);
    }
}

TEST_CASE("group_scans splits on scan id and keeps frame order", "[trace]") {
    const SessionLog log =
        validate_log(two_scan_records(), MetricPolarity::LoadDecreasesMetric);
    const std::vector<ScanWindow> windows = group_scans(log);
    REQUIRE(windows.size() == 2);
    REQUIRE(windows[0].axis == Axis::X);
    REQUIRE(windows[0].size() == 2);
    REQUIRE(windows[1].axis == Axis::Y);
    REQUIRE(windows[1].size() == 2);
    REQUIRE(windows[0].metric[1] == 101.0);
    REQUIRE(windows[1].hco_angle_deg[0] == -5.0);
}

TEST_CASE("group_scans handles single-frame scans", "[trace]") {
    std::vector<FrameRecord> r = {
        rec(0.00, 1.0, 0.0, Axis::X, 1),
        rec(0.01, 1.0, 0.0, Axis::Y, 2),
        rec(0.02, 1.0, 0.0, Axis::X, 3),
    };
    const auto windows =
        group_scans(validate_log(r, MetricPolarity::LoadIncreasesMetric));
    REQUIRE(windows.size() == 3);
    for (const ScanWindow& w : windows) REQUIRE(w.size() == 1);
}

TEST_CASE("group_scans demands the first scan sweep X", "[trace]") {
    std::vector<FrameRecord> r = {
        rec(0.00, 1.0, 0.0, Axis::Y, 1),
        rec(0.01, 1.0, 1.0, Axis::Y, 1),
    };
    const SessionLog log = validate_log(r, MetricPolarity::LoadIncreasesMetric);
    try {
        group_scans(log);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::AxisAlternationViolation);
    }
}

TEST_CASE("group_scans demands scans alternate X and Y", "[trace]") {
    std::vector<FrameRecord> r = {
        rec(0.00, 1.0, 0.0, Axis::X, 1),
        rec(0.01, 1.0, 0.0, Axis::X, 2),
    };
    const SessionLog log = validate_log(r, MetricPolarity::LoadIncreasesMetric);
    try {
        group_scans(log);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::AxisAlternationViolation);
    }
}

TEST_CASE("session CSV round-trip is byte-identical", "[trace]") {
    std::vector<FrameRecord> r = two_scan_records();
    r[0].gt_x_deg = 5.25;
    r[0].gt_y_deg = -3.125;
    r[2].gt_y_deg = 0.1;
    SessionLog log = validate_log(r, MetricPolarity::LoadDecreasesMetric, "unit-test");

    const std::string once = serialize_log(log);
    const SessionLog parsed = parse_log(once, MetricPolarity::LoadDecreasesMetric);
    REQUIRE(parsed.generator == log.generator);
    REQUIRE(parsed.records.size() == log.records.size());
    REQUIRE(parsed.records[0].gt_x_deg == log.records[0].gt_x_deg);
    REQUIRE_FALSE(parsed.records[1].gt_x_deg.has_value());
    REQUIRE(serialize_log(parsed) == once);
}

TEST_CASE("session CSV survives a file round-trip", "[trace]") {
    const SessionLog log =
        validate_log(two_scan_records(), MetricPolarity::LoadDecreasesMetric);
    const std::string path = "trace_roundtrip_tmp.csv";
    write_log(path, log);
    const SessionLog back = read_log(path, MetricPolarity::LoadDecreasesMetric);
    REQUIRE(serialize_log(back) == serialize_log(log));
    std::remove(path.c_str());
}

TEST_CASE("parse_log rejects a wrong header", "[trace]") {
    try {
        parse_log("a,b,c\n1,2,3\n", MetricPolarity::LoadIncreasesMetric);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::ParseError);
    }
}

TEST_CASE("parse_log rejects junk fields", "[trace]") {
    const std::string text =
        std::string(kSessionCsvHeader) + "\n0.0,abc,0.0,X,1,,\n";
    try {
        parse_log(text, MetricPolarity::LoadIncreasesMetric);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::ParseError);
    }
}

TEST_CASE("axis names render as X and Y", "[trace]") {
    REQUIRE(std::string(axis_name(Axis::X)) == "X");
    REQUIRE(std::string(axis_name(Axis::Y)) == "Y");
}
