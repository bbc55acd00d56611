#include "ifnet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ifnet/types.hpp"

namespace ifnet {

namespace {

constexpr double kWidth = 640.0, kHeight = 420.0;
constexpr double kPad = 48.0;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

}  // namespace

std::string emit_line_svg(const std::vector<SvgSeries>& series, const std::string& title,
                          bool loglog) {
    if (series.empty()) throw config_error("emit_svg: empty data");
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size())
            throw config_error("emit_svg: malformed series");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double x = s.x[i], y = s.y[i];
            if (loglog) {
                if (!(x > 0.0) || !(y > 0.0)) continue;
                x = std::log10(x);
                y = std::log10(y);
            }
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;

    auto px = [&](double x) { return kPad + (x - xmin) / (xmax - xmin) * (kWidth - 2 * kPad); };
    auto py = [&](double y) {
        return kHeight - kPad - (y - ymin) / (ymax - ymin) * (kHeight - 2 * kPad);
    };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
           num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
           title + (loglog ? " (log-log)" : "") + "</text>\n";
    out += "<rect x=\"" + num(kPad) + "\" y=\"" + num(kPad) + "\" width=\"" +
           num(kWidth - 2 * kPad) + "\" height=\"" + num(kHeight - 2 * kPad) +
           "\" fill=\"none\" stroke=\"#333\"/>\n";

    int ci = 0;
    for (const auto& s : series) {
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double x = s.x[i], y = s.y[i];
            if (loglog) {
                if (!(x > 0.0) || !(y > 0.0)) continue;
                x = std::log10(x);
                y = std::log10(y);
            }
            pts += num(px(x)) + "," + num(py(y)) + " ";
        }
        const char* color = kColors[ci % 8];
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        if (!s.label.empty()) {
            out += "<text x=\"" + num(kWidth - kPad - 4) + "\" y=\"" +
                   num(kPad + 16.0 * (ci + 1)) + "\" text-anchor=\"end\" font-size=\"11\" fill=\"" +
                   color + "\">" + s.label + "</text>\n";
        }
        ++ci;
    }
    out += "</svg>\n";
    return out;
}

std::string emit_raster_svg(const std::vector<std::pair<int, double>>& spikes, int n_rows,
                            double t_max, const std::string& title) {
    if (n_rows <= 0) throw config_error("emit_svg: empty raster");
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
           num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
           title + "</text>\n";
    const double row_h = (kHeight - 2 * kPad) / n_rows;
    for (int r = 0; r < n_rows; ++r) {
        const double y = kPad + row_h * (r + 0.5);
        out += "<g class=\"row\"><line x1=\"" + num(kPad) + "\" y1=\"" + num(y) + "\" x2=\"" +
               num(kWidth - kPad) + "\" y2=\"" + num(y) + "\" stroke=\"#eee\"/>";
        for (const auto& [p, t] : spikes) {
            if (p != r) continue;
            const double x = kPad + t / t_max * (kWidth - 2 * kPad);
            out += "<line x1=\"" + num(x) + "\" y1=\"" + num(y - row_h * 0.4) + "\" x2=\"" +
                   num(x) + "\" y2=\"" + num(y + row_h * 0.4) + "\" stroke=\"" +
                   kColors[r % 8] + "\" stroke-width=\"1.5\"/>";
        }
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace ifnet
