#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace tsecon::svg {

struct LineSeries {
    std::string label;
    std::vector<double> values;  // plotted against index
};

/// Minimal polyline chart for quick inspection of pipeline outputs. Returns
/// the SVG document as a string.
inline std::string line_chart(const std::string& title, const std::vector<LineSeries>& series,
                              int width = 900, int height = 360) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    const double left = 60, right = 20, top = 40, bottom = 30;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::size_t n = 0;
    for (const auto& s : series) {
        n = std::max(n, s.values.size());
        for (double v : s.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!(hi > lo)) {
        hi = lo + 1.0;
        lo -= 1.0;
    }

    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                  "viewBox=\"0 0 %d %d\">\n",
                  width, height, width, height);
    out += buf;
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" "
                  "text-anchor=\"middle\">%s</text>\n",
                  width / 2, title.c_str());
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", left,
                  top + plot_h, left + plot_w, top + plot_h);
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", left,
                  top, left, top + plot_h);
    out += buf;
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = lo + (hi - lo) * tick / 4.0;
        const double y = top + plot_h - plot_h * tick / 4.0;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" "
                      "text-anchor=\"end\">%.4g</text>\n",
                      left - 6, y + 4, v);
        out += buf;
    }

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        if (s.values.size() < 2) continue;
        out += "<polyline fill=\"none\" stroke=\"";
        out += colors[si % 4];
        out += "\" stroke-width=\"1\" points=\"";
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            const double x = left + plot_w * static_cast<double>(i) / static_cast<double>(n - 1);
            const double y = top + plot_h - plot_h * (s.values[i] - lo) / (hi - lo);
            std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", x, y);
            out += buf;
        }
        out += "\"/>\n";
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"12\" "
                      "fill=\"%s\">%s</text>\n",
                      left + 10 + 140.0 * static_cast<double>(si), top - 6, colors[si % 4],
                      s.label.c_str());
        out += buf;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace tsecon::svg
