#pragma once

#include <string>
#include <vector>

namespace qgtlab::cli {

struct Series {
    std::string label;
    std::vector<double> x, y;  // non-finite points are skipped
    bool markers = false;      // scatter markers instead of a polyline
};

struct Chart {
    std::string title;
    std::string xLabel;
    std::string yLabel;
    std::vector<Series> series;
};

/// Standalone SVG 1.1 line/scatter chart with axes, ticks and a legend. The
/// convention block is embedded in a <metadata> element.
std::string render_svg(const Chart& chart);

/// Round tick positions covering [lo, hi], about `target` of them.
std::vector<double> nice_ticks(double lo, double hi, int target = 6);

std::string xml_escape(const std::string& s);

}  // namespace qgtlab::cli
