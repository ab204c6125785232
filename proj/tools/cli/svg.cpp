#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace markup::cli {
namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

}  // namespace

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&':
                out += "&amp;";
                break;
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '"':
                out += "&quot;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_line(std::string name, Points points) { series_.push_back({std::move(name), std::move(points), true}); }

void SvgPlot::add_points(std::string name, Points points) {
    series_.push_back({std::move(name), std::move(points), false});
}

std::string SvgPlot::render(int width, int height) const {
    double x0 = std::numeric_limits<double>::infinity();
    double x1 = -x0;
    double y0 = x0;
    double y1 = -x0;
    for (const auto& s : series_) {
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) {
                continue;
            }
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    if (!(x0 <= x1)) {
        x0 = 0.0;
        x1 = 1.0;
        y0 = 0.0;
        y1 = 1.0;
    }
    if (x1 - x0 < 1e-12) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if (y1 - y0 < 1e-12) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double left = 70.0;
    const double right = width - 150.0;
    const double top = 40.0;
    const double bottom = height - 55.0;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (right - left); };
    auto py = [&](double y) { return bottom - (y - y0) / (y1 - y0) * (bottom - top); };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    os << "<!-- markup_guarantee 0.1.0 -->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << num((left + right) / 2) << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"15\">" << xml_escape(title_) << "</text>\n";
    os << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    os << "<line x1=\"" << num(left) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(right) << "\" y2=\""
       << num(bottom) << "\"/>\n";
    os << "<line x1=\"" << num(left) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(left) << "\" y2=\"" << num(top)
       << "\"/>\n";
    os << "</g>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x0 + (x1 - x0) * i / 5.0;
        const double yv = y0 + (y1 - y0) * i / 5.0;
        os << "<line x1=\"" << num(px(xv)) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(px(xv)) << "\" y2=\""
           << num(bottom + 5) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(bottom + 18) << "\" text-anchor=\"middle\">" << tick(xv)
           << "</text>\n";
        os << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(py(yv)) << "\" x2=\"" << num(left) << "\" y2=\""
           << num(py(yv)) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << num(left - 8) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << tick(yv)
           << "</text>\n";
    }
    os << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << num(bottom + 40)
       << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(x_label_) << "</text>\n";
    os << "<text x=\"18\" y=\"" << num((top + bottom) / 2) << "\" text-anchor=\"middle\" font-size=\"13\" "
       << "transform=\"rotate(-90 18 " << num((top + bottom) / 2) << ")\">" << xml_escape(y_label_) << "</text>\n";
    os << "</g>\n";

    std::size_t idx = 0;
    for (const auto& s : series_) {
        const char* color = kPalette[idx % (sizeof kPalette / sizeof kPalette[0])];
        if (s.line) {
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            bool first = true;
            for (const auto& [x, y] : s.points) {
                if (!std::isfinite(x) || !std::isfinite(y)) {
                    continue;
                }
                os << (first ? "" : " ") << num(px(x)) << ',' << num(py(y));
                first = false;
            }
            os << "\"/>\n";
        } else {
            os << "<g fill=\"" << color << "\">\n";
            for (const auto& [x, y] : s.points) {
                if (std::isfinite(x) && std::isfinite(y)) {
                    os << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"2.5\"/>\n";
                }
            }
            os << "</g>\n";
        }
        const double ly = top + 10 + 18.0 * static_cast<double>(idx);
        os << "<rect x=\"" << num(right + 12) << "\" y=\"" << num(ly - 8) << "\" width=\"12\" height=\"8\" fill=\""
           << color << "\"/>\n";
        os << "<text x=\"" << num(right + 30) << "\" y=\"" << num(ly) << "\" font-family=\"sans-serif\" "
           << "font-size=\"11\">" << xml_escape(s.name) << "</text>\n";
        ++idx;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace markup::cli
