#pragma once

#include <string>
#include <vector>

namespace pmac {

struct PlotPoint {
    double x = 0;
    double y = 0;
    double y_min = 0;
    double y_max = 0;
};

struct PlotSeries {
    std::string name;
    std::vector<PlotPoint> points;
    /// Palette index; negative means the series position.
    int color = -1;
    bool dashed = false;
};

/// Line chart with min-max whiskers per point.
struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    std::vector<PlotSeries> series;
};

std::string render_svg(const LineChart& chart);

}  // namespace pmac
