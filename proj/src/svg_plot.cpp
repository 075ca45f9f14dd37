#include "prioritymac/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace pmac {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 55;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

std::string render_svg(const LineChart& chart) {
    double x0 = std::numeric_limits<double>::max(), x1 = std::numeric_limits<double>::lowest();
    double y1 = 0;
    for (const auto& s : chart.series) {
        for (const auto& p : s.points) {
            const double x = chart.log_x ? std::log2(p.x) : p.x;
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y1 = std::max({y1, p.y, p.y_max});
        }
    }
    if (x0 > x1) {
        x0 = 0;
        x1 = 1;
    }
    if (x1 == x0) {
        x1 = x0 + 1;
    }
    if (y1 <= 0) {
        y1 = 1;
    }
    const double raw = y1 / 5;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = 10 * mag;
    for (double m : {1.0, 2.0, 2.5, 5.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    const int ticks = static_cast<int>(std::ceil(y1 / step - 1e-9));
    y1 = ticks * step;
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + ((chart.log_x ? std::log2(x) : x) - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return kTop + ph - y / y1 * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(chart.title) << "</text>\n";
    o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

    std::vector<double> xticks;
    for (const auto& s : chart.series) {
        for (const auto& p : s.points) {
            if (std::find(xticks.begin(), xticks.end(), p.x) == xticks.end()) {
                xticks.push_back(p.x);
            }
        }
    }
    for (double x : xticks) {
        o << "<text x=\"" << num(sx(x)) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">"
          << tick_label(x) << "</text>\n";
    }
    for (int i = 0; i <= ticks; ++i) {
        const double y = step * i;
        o << "<line x1=\"" << kLeft << "\" x2=\"" << num(kLeft + pw) << "\" y1=\"" << num(sy(y)) << "\" y2=\""
          << num(sy(y)) << "\" stroke=\"#ddd\"/>\n";
        o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(y) + 4) << "\" text-anchor=\"end\">"
          << tick_label(y) << "</text>\n";
    }
    o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
      << escape(chart.x_label) << "</text>\n";
    o << "<text transform=\"translate(16," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(chart.y_label) << "</text>\n";

    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const auto& s = chart.series[i];
        const std::size_t palette = s.color >= 0 ? static_cast<std::size_t>(s.color) : i;
        const char* color = kColors[palette % std::size(kColors)];
        const char* dash = s.dashed ? "\" stroke-dasharray=\"6,4" : "";
        o << "<polyline fill=\"none\" stroke=\"" << color << dash << "\" stroke-width=\"2\" points=\"";
        for (const auto& p : s.points) {
            o << num(sx(p.x)) << "," << num(sy(p.y)) << " ";
        }
        o << "\"/>\n";
        for (const auto& p : s.points) {
            const double x = sx(p.x);
            o << "<line x1=\"" << num(x) << "\" x2=\"" << num(x) << "\" y1=\"" << num(sy(p.y_min)) << "\" y2=\""
              << num(sy(p.y_max)) << "\" stroke=\"" << color << "\"/>\n";
            o << "<circle cx=\"" << num(x) << "\" cy=\"" << num(sy(p.y)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const double ly = kTop + 16 + 20.0 * static_cast<double>(i);
        o << "<line x1=\"" << num(kLeft + pw + 12) << "\" x2=\"" << num(kLeft + pw + 32) << "\" y1=\"" << num(ly)
          << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << dash << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << num(kLeft + pw + 38) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.name)
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace pmac
