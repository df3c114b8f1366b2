#ifndef SSMR_HISTOGRAM_HPP
#define SSMR_HISTOGRAM_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace ssmr {

struct HistogramBin {
    double low = 0.0;
    double high = 0.0;
    std::size_t count = 0;

    bool operator==(const HistogramBin&) const = default;
};

/// Uniform bins over [-1, 1]. Bins are [low, high) except the last, which
/// is closed, so -1 lands in the first bin and +1 in the last.
inline std::vector<HistogramBin> histogram(std::span<const double> ratios, int bins) {
    if (bins < 2) throw ConfigError("histogram needs at least two bins");
    std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
    for (int i = 0; i < bins; ++i) {
        out[i].low = -1.0 + 2.0 * i / bins;
        out[i].high = -1.0 + 2.0 * (i + 1) / bins;
    }
    for (double r : ratios) {
        if (!(r >= -1.0 && r <= 1.0)) {
            throw InvariantViolation("ratio outside [-1, 1] reached the histogram");
        }
        auto idx = static_cast<int>(std::floor((r + 1.0) * bins / 2.0));
        idx = std::clamp(idx, 0, bins - 1);
        ++out[static_cast<std::size_t>(idx)].count;
    }
    return out;
}

/// Static bar-outline chart; every series is drawn as a step outline over the same axes.
inline std::string render_histogram_svg(const std::vector<std::pair<std::string, std::vector<HistogramBin>>>& series,
                                        const std::string& title) {
    constexpr double width = 640.0, height = 400.0;
    constexpr double left = 50.0, right = 20.0, top = 40.0, bottom = 40.0;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    std::size_t peak = 1;
    for (const auto& [name, bins] : series) {
        for (const auto& b : bins) peak = std::max(peak, b.count);
    }
    auto sx = [&](double v) { return left + (v + 1.0) / 2.0 * (width - left - right); };
    auto sy = [&](double c) { return height - bottom - c / static_cast<double>(peak) * (height - top - bottom); };

    std::string svg;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                  width, height, width, height);
    svg += buf;
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">", left);
    svg += buf;
    svg += title + "</text>\n";
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n"
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  left, height - bottom, width - right, height - bottom, left, top, left, height - bottom);
    svg += buf;
    for (double tick : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" "
                      "text-anchor=\"middle\">%g</text>\n",
                      sx(tick), height - bottom + 16.0, tick);
        svg += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">%zu</text>\n",
                  left - 6.0, top + 4.0, peak);
    svg += buf;

    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& [name, bins] = series[s];
        const char* color = colors[s % (sizeof colors / sizeof colors[0])];
        std::string points;
        double x0 = sx(-1.0);
        std::snprintf(buf, sizeof buf, "%.2f,%.2f", x0, sy(0.0));
        points += buf;
        for (const auto& b : bins) {
            std::snprintf(buf, sizeof buf, " %.2f,%.2f %.2f,%.2f", sx(b.low), sy(static_cast<double>(b.count)),
                          sx(b.high), sy(static_cast<double>(b.count)));
            points += buf;
        }
        std::snprintf(buf, sizeof buf, " %.2f,%.2f", sx(1.0), sy(0.0));
        points += buf;
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"12\" fill=\"%s\" "
                      "text-anchor=\"end\">",
                      width - right, top + 14.0 * static_cast<double>(s + 1), color);
        svg += buf;
        svg += name + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}

#endif
