#ifndef KLEIN_SVG_PLOT_HPP
#define KLEIN_SVG_PLOT_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "klein/format.hpp"

// Minimal hand-rolled SVG line plots: axes box, ticks, polylines, legend.
// No dependencies; output is deterministic (shortest round-trip floats).

namespace klein::svg {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct LinePlot {
    std::string title;
    std::string xlabel, ylabel;
    std::vector<Series> series;
};

namespace detail {

inline std::string fmt(double v) { return num::format_double(v); }

inline const char* color(size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    return palette[i % 6];
}

}  // namespace detail

// Renders the plots stacked vertically in a single SVG document.
inline std::string render(const std::vector<LinePlot>& plots, int width = 720,
                          int panel_height = 360) {
    const double ml = 72, mr = 24, mt = 36, mb = 48;
    std::string out;
    int total_h = panel_height * static_cast<int>(plots.size());
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           std::to_string(width) + "\" height=\"" + std::to_string(total_h) +
           "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (size_t pi = 0; pi < plots.size(); ++pi) {
        const auto& pl = plots[pi];
        double top = pi * panel_height;
        double x0 = ml, x1 = width - mr;
        double y0 = top + panel_height - mb, y1 = top + mt;

        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto& s : pl.series)
            for (auto [x, y] : s.points) {
                if (!std::isfinite(x) || !std::isfinite(y)) continue;
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        if (xmin > xmax) {
            xmin = 0;
            xmax = 1;
        }
        if (ymin > ymax) {
            ymin = 0;
            ymax = 1;
        }
        if (xmax == xmin) xmax = xmin + 1;
        if (ymax == ymin) ymax = ymin + 1;
        double ypad = 0.05 * (ymax - ymin);
        ymin -= ypad;
        ymax += ypad;

        auto X = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0); };
        auto Y = [&](double y) { return y0 - (y - ymin) / (ymax - ymin) * (y0 - y1); };

        out += "<rect x=\"" + detail::fmt(x0) + "\" y=\"" + detail::fmt(y1) +
               "\" width=\"" + detail::fmt(x1 - x0) + "\" height=\"" +
               detail::fmt(y0 - y1) + "\" fill=\"none\" stroke=\"black\"/>\n";
        out += "<text x=\"" + detail::fmt(0.5 * (x0 + x1)) + "\" y=\"" +
               detail::fmt(top + 20) + "\" text-anchor=\"middle\">" + pl.title +
               "</text>\n";
        out += "<text x=\"" + detail::fmt(0.5 * (x0 + x1)) + "\" y=\"" +
               detail::fmt(y0 + 36) + "\" text-anchor=\"middle\">" + pl.xlabel +
               "</text>\n";
        out += "<text x=\"16\" y=\"" + detail::fmt(0.5 * (y0 + y1)) +
               "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
               detail::fmt(0.5 * (y0 + y1)) + ")\">" + pl.ylabel + "</text>\n";

        const int nticks = 5;
        for (int t = 0; t <= nticks; ++t) {
            double fx = xmin + (xmax - xmin) * t / nticks;
            double fy = ymin + (ymax - ymin) * t / nticks;
            out += "<line x1=\"" + detail::fmt(X(fx)) + "\" x2=\"" + detail::fmt(X(fx)) +
                   "\" y1=\"" + detail::fmt(y0) + "\" y2=\"" + detail::fmt(y0 + 5) +
                   "\" stroke=\"black\"/>\n";
            out += "<text x=\"" + detail::fmt(X(fx)) + "\" y=\"" + detail::fmt(y0 + 18) +
                   "\" text-anchor=\"middle\">" + detail::fmt(fx) + "</text>\n";
            out += "<line x1=\"" + detail::fmt(x0 - 5) + "\" x2=\"" + detail::fmt(x0) +
                   "\" y1=\"" + detail::fmt(Y(fy)) + "\" y2=\"" + detail::fmt(Y(fy)) +
                   "\" stroke=\"black\"/>\n";
            out += "<text x=\"" + detail::fmt(x0 - 8) + "\" y=\"" +
                   detail::fmt(Y(fy) + 4) + "\" text-anchor=\"end\">" + detail::fmt(fy) +
                   "</text>\n";
        }

        for (size_t si = 0; si < pl.series.size(); ++si) {
            const auto& s = pl.series[si];
            std::string pts;
            for (auto [x, y] : s.points) {
                if (!std::isfinite(x) || !std::isfinite(y)) continue;
                pts += detail::fmt(X(x)) + "," + detail::fmt(Y(y)) + " ";
            }
            out += "<polyline fill=\"none\" stroke=\"" +
                   std::string(detail::color(si)) + "\" stroke-width=\"1.5\" points=\"" +
                   pts + "\"/>\n";
            out += "<text x=\"" + detail::fmt(x1 - 8) + "\" y=\"" +
                   detail::fmt(y1 + 16 + 16 * si) + "\" text-anchor=\"end\" fill=\"" +
                   detail::color(si) + "\">" + s.label + "</text>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

}  // namespace klein::svg

#endif
