#pragma once

#include <string>
#include <vector>

namespace ifnet {

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Minimal deterministic plots: fixed canvas, %.6g coordinates, no
// timestamps, so equal input gives byte-identical output.
std::string emit_line_svg(const std::vector<SvgSeries>& series, const std::string& title,
                          bool loglog = false);

// Spike raster: one mark row per particle index.
std::string emit_raster_svg(const std::vector<std::pair<int, double>>& spikes, int n_rows,
                            double t_max, const std::string& title);

}  // namespace ifnet
