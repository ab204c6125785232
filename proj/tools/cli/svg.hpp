#pragma once

#include <string>
#include <utility>
#include <vector>

namespace markup::cli {

/// Minimal line/scatter chart rendered as a standalone SVG document.
class SvgPlot {
public:
    using Points = std::vector<std::pair<double, double>>;

    SvgPlot(std::string title, std::string x_label, std::string y_label);

    void add_line(std::string name, Points points);
    void add_points(std::string name, Points points);

    [[nodiscard]] std::string render(int width = 640, int height = 480) const;

private:
    struct Series {
        std::string name;
        Points points;
        bool line;
    };
    std::string title_;
    std::string x_label_;
    std::string y_label_;
    std::vector<Series> series_;
};

std::string xml_escape(const std::string& s);

}  // namespace markup::cli
