#include "fogbench/svg.hpp"

#include "fogbench/trace_csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace fogbench::svg {

namespace {

const char* kPalette[] = {"#4d4d4d", "#b03a3a", "#2a7f7f", "#7f5c2a", "#5c2a7f", "#2a7f3a"};

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(hi > lo)) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double margin = 0.05 * (hi - lo);
        lo -= margin;
        hi += margin;
    }
};

} // namespace

std::string LinePlot::render() const {
    const double margin_left = 64.0;
    const double margin_right = 16.0;
    const double margin_top = 32.0;
    const double margin_bottom = 48.0;
    const double plot_w = width - margin_left - margin_right;
    const double plot_h = height - margin_top - margin_bottom;

    Range xr, yr;
    for (const Series& s : series)
        for (const auto& [x, y] : s.points) {
            xr.include(x);
            yr.include(y);
        }
    if (!std::isfinite(xr.lo)) {
        xr = {0.0, 1.0};
        yr = {0.0, 1.0};
    }
    xr.pad();
    yr.pad();

    auto px = [&](double x) { return margin_left + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto py = [&](double y) { return margin_top + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" font-family=\"sans-serif\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(width / 2.0) + "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" +
           title + "</text>\n";

    // frame and grid with 5 ticks per axis
    out += "<rect x=\"" + num(margin_left) + "\" y=\"" + num(margin_top) + "\" width=\"" +
           num(plot_w) + "\" height=\"" + num(plot_h) +
           "\" fill=\"none\" stroke=\"#888888\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = xr.lo + (xr.hi - xr.lo) * i / 5.0;
        const double yv = yr.lo + (yr.hi - yr.lo) * i / 5.0;
        out += "<line x1=\"" + num(px(xv)) + "\" y1=\"" + num(margin_top) + "\" x2=\"" +
               num(px(xv)) + "\" y2=\"" + num(margin_top + plot_h) +
               "\" stroke=\"#dddddd\"/>\n";
        out += "<line x1=\"" + num(margin_left) + "\" y1=\"" + num(py(yv)) + "\" x2=\"" +
               num(margin_left + plot_w) + "\" y2=\"" + num(py(yv)) +
               "\" stroke=\"#dddddd\"/>\n";
        out += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(margin_top + plot_h + 16.0) +
               "\" text-anchor=\"middle\" font-size=\"10\">" + num(xv) + "</text>\n";
        out += "<text x=\"" + num(margin_left - 6.0) + "\" y=\"" + num(py(yv) + 3.0) +
               "\" text-anchor=\"end\" font-size=\"10\">" + num(yv) + "</text>\n";
    }
    out += "<text x=\"" + num(margin_left + plot_w / 2.0) + "\" y=\"" +
           num(height - 10.0) + "\" text-anchor=\"middle\" font-size=\"11\">" + x_label +
           "</text>\n";
    out += "<text x=\"14\" y=\"" + num(margin_top + plot_h / 2.0) +
           "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 14 " +
           num(margin_top + plot_h / 2.0) + ")\">" + y_label + "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const Series& s = series[i];
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
        std::string path;
        for (const auto& [x, y] : s.points) {
            path += path.empty() ? "M" : " L";
            path += num(px(x)) + " " + num(py(y));
        }
        out += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"1.5\"";
        if (s.dashed) out += " stroke-dasharray=\"6 3\"";
        out += "/>\n";
        // legend entry
        const double ly = margin_top + 14.0 + 14.0 * static_cast<double>(i);
        out += "<line x1=\"" + num(margin_left + 8.0) + "\" y1=\"" + num(ly) + "\" x2=\"" +
               num(margin_left + 28.0) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"";
        if (s.dashed) out += " stroke-dasharray=\"6 3\"";
        out += "/>\n";
        out += "<text x=\"" + num(margin_left + 32.0) + "\" y=\"" + num(ly + 3.0) +
               "\" font-size=\"10\">" + s.label + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

void LinePlot::write(const std::filesystem::path& path) const {
    io::write_file_atomic(path, render());
}

} // namespace fogbench::svg
