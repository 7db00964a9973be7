#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gazelab/error.hpp"
#include "gazelab/text.hpp"

namespace gazelab {

/// Minimal static line plots: enough for the report figures, fully
/// deterministic text output, no dependencies.

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    int width = 640;
    int height = 420;
    bool markers = true;
};

namespace svg_detail {

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                           "#9467bd", "#ff7f0e", "#8c564b"};
inline constexpr int kPaletteSize = 6;

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

inline Range span(const std::vector<PlotSeries>& series, bool use_x) {
    Range r;
    bool first = true;
    for (const PlotSeries& s : series) {
        for (double v : use_x ? s.x : s.y) {
            if (first) {
                r.lo = r.hi = v;
                first = false;
            } else {
                r.lo = std::min(r.lo, v);
                r.hi = std::max(r.hi, v);
            }
        }
    }
    if (first) return Range{0.0, 1.0};
    if (r.hi == r.lo) {
        r.lo -= 1.0;
        r.hi += 1.0;
    }
    const double pad = (r.hi - r.lo) * 0.05;
    return Range{r.lo - pad, r.hi + pad};
}

} // namespace svg_detail

inline std::string render_svg(const Plot& plot) {
    if (plot.series.empty()) {
        throw Error(ErrorCode::EmptyTrace, "plot has no series");
    }
    using namespace svg_detail;
    const int ml = 62, mr = 18, mt = 40, mb = 50;
    const double pw = plot.width - ml - mr;
    const double ph = plot.height - mt - mb;
    const Range rx = span(plot.series, true);
    const Range ry = span(plot.series, false);
    auto px = [&](double x) { return ml + (x - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ry.lo) / (ry.hi - ry.lo) * ph; };
    auto num = [](double v) { return fmt_sig(v, 6); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_int(plot.width) +
           "\" height=\"" + fmt_int(plot.height) + "\" viewBox=\"0 0 " + fmt_int(plot.width) +
           " " + fmt_int(plot.height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(plot.width / 2.0) +
           "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
           plot.title + "</text>\n";

    // Grid and ticks: 5 evenly spaced per axis.
    for (int i = 0; i <= 4; ++i) {
        const double fx = rx.lo + (rx.hi - rx.lo) * i / 4.0;
        const double fy = ry.lo + (ry.hi - ry.lo) * i / 4.0;
        const double gx = px(fx);
        const double gy = py(fy);
        out += "<line x1=\"" + num(gx) + "\" y1=\"" + fmt_int(mt) + "\" x2=\"" + num(gx) +
               "\" y2=\"" + num(mt + ph) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out += "<line x1=\"" + fmt_int(ml) + "\" y1=\"" + num(gy) + "\" x2=\"" + num(ml + pw) +
               "\" y2=\"" + num(gy) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out += "<text x=\"" + num(gx) + "\" y=\"" + num(mt + ph + 16) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt_sig(fx, 4) + "</text>\n";
        out += "<text x=\"" + num(ml - 6) + "\" y=\"" + num(gy + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt_sig(fy, 4) + "</text>\n";
    }
    out += "<rect x=\"" + fmt_int(ml) + "\" y=\"" + fmt_int(mt) + "\" width=\"" + num(pw) +
           "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
    out += "<text x=\"" + num(ml + pw / 2) + "\" y=\"" + num(plot.height - 10.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           plot.x_label + "</text>\n";
    out += "<text x=\"16\" y=\"" + num(mt + ph / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 " +
           num(mt + ph / 2) + ")\">" + plot.y_label + "</text>\n";

    for (std::size_t s = 0; s < plot.series.size(); ++s) {
        const PlotSeries& ser = plot.series[s];
        const char* color = kPalette[s % kPaletteSize];
        if (ser.x.size() != ser.y.size()) {
            throw Error(ErrorCode::LengthMismatch, "series x/y lengths differ");
        }
        if (ser.x.size() > 1) {
            out += "<polyline fill=\"none\" stroke=\"";
            out += color;
            out += "\" stroke-width=\"1.8\" points=\"";
            for (std::size_t i = 0; i < ser.x.size(); ++i) {
                if (i) out += ' ';
                out += num(px(ser.x[i])) + "," + num(py(ser.y[i]));
            }
            out += "\"/>\n";
        }
        if (plot.markers) {
            for (std::size_t i = 0; i < ser.x.size(); ++i) {
                out += "<circle cx=\"" + num(px(ser.x[i])) + "\" cy=\"" + num(py(ser.y[i])) +
                       "\" r=\"2.6\" fill=\"";
                out += color;
                out += "\"/>\n";
            }
        }
        // Legend entry, top right, one line per series.
        const double ly = mt + 14.0 + 16.0 * static_cast<double>(s);
        out += "<line x1=\"" + num(ml + pw - 120) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
               num(ml + pw - 100) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"";
        out += color;
        out += "\" stroke-width=\"2.5\"/>\n";
        out += "<text x=\"" + num(ml + pw - 94) + "\" y=\"" + num(ly) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + ser.label + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace gazelab
