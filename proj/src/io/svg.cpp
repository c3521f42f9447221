#include "purcell/io/svg.hpp"

#include "purcell/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace purcell::io {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
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
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace

std::string line_chart(const std::vector<Series>& series, const ChartOptions& o) {
    auto ty = [&](double y) { return o.log_y ? std::log10(y) : y; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
    double y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) {
            throw DomainError("series '" + s.name + "' has mismatched x and y");
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double y = ty(s.y[i]);
            if (!std::isfinite(s.x[i]) || !std::isfinite(y)) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    if (!(x1 >= x0) || !(y1 >= y0)) {
        x0 = y0 = 0.0;
        x1 = y1 = 1.0;
    }
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }

    const double left = 80, right = 20, top = 40, bottom = 60;
    const double pw = o.width - left - right;
    const double ph = o.height - top - bottom;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\""
        << o.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << num(o.width / 2.0) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(o.title) << "</text>\n";
    svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw)
        << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double xv = x0 + (x1 - x0) * i / kTicks;
        const double yv = y0 + (y1 - y0) * i / kTicks;
        svg << "<line x1=\"" << num(px(xv)) << "\" y1=\"" << num(top + ph) << "\" x2=\""
            << num(px(xv)) << "\" y2=\"" << num(top + ph + 5) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(top + ph + 18)
            << "\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n";
        svg << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(py(yv)) << "\" x2=\""
            << num(left) << "\" y2=\"" << num(py(yv)) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << num(left - 8) << "\" y=\"" << num(py(yv) + 4)
            << "\" text-anchor=\"end\">" << tick_label(o.log_y ? std::pow(10.0, yv) : yv)
            << "</text>\n";
    }
    svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(o.height - 15.0)
        << "\" text-anchor=\"middle\">" << escape(o.x_label) << "</text>\n";
    svg << "<text transform=\"translate(18," << num(top + ph / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">" << escape(o.y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        std::string points;
        auto flush = [&] {
            if (!points.empty()) {
                svg << "<polyline fill=\"none\" stroke=\"" << color
                    << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
                points.clear();
            }
        };
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double y = ty(s.y[i]);
            if (!std::isfinite(s.x[i]) || !std::isfinite(y)) {
                flush();
                continue;
            }
            if (!points.empty()) points += ' ';
            points += num(px(s.x[i])) + "," + num(py(y));
        }
        flush();
        svg << "<text x=\"" << num(left + pw - 10) << "\" y=\"" << num(top + 16.0 + 16.0 * k)
            << "\" text-anchor=\"end\" fill=\"" << color << "\">" << escape(s.name) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace purcell::io
