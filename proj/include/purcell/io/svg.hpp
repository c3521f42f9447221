#pragma once

#include <string>
#include <vector>

namespace purcell::io {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;  // non-finite values break the polyline
};

struct ChartOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    int width = 720;
    int height = 440;
};

/// Self-contained SVG line chart: axes, ticks, one polyline per series.
[[nodiscard]] std::string line_chart(const std::vector<Series>& series, const ChartOptions& options);

}  // namespace purcell::io
