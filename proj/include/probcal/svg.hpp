#pragma once

// Static SVG renderings of reliability diagrams and score histograms. The
// chart height is a power of two so bar heights (accuracy * 256) divide back
// to the exact stored values; each bar also carries the number verbatim in a
// data attribute.

#include <string>
#include <vector>

#include "probcal/format.hpp"
#include "probcal/metrics.hpp"

namespace probcal {

inline constexpr double kSvgChartHeight = 256.0;

namespace detail {

inline void svg_open(std::string& s, double width, double height) {
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_double(width) +
         "\" height=\"" + format_double(height) + "\" viewBox=\"0 0 " + format_double(width) +
         " " + format_double(height) + "\">\n";
}

inline void svg_text(std::string& s, double x, double y, const std::string& text,
                     const char* anchor = "start") {
    s += "  <text x=\"" + format_double(x) + "\" y=\"" + format_double(y) +
         "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"" + anchor + "\">" + text +
         "</text>\n";
}

} // namespace detail

// Accuracy bars per confidence bin, the confidence level of each bin as a gap
// overlay, and the identity diagonal of a perfectly calibrated output.
inline std::string render_reliability_svg(const ReliabilityReport& rel, const std::string& title) {
    const int m_count = rel.bin_count;
    const double margin = 40.0;
    const double chart = kSvgChartHeight;
    const double bar_w = chart / m_count;
    const double width = chart + 2 * margin;
    const double height = chart + 2 * margin;
    const double x0 = margin;
    const double y0 = margin + chart; // chart baseline

    std::string s;
    detail::svg_open(s, width, height);
    detail::svg_text(s, width / 2, margin / 2, title, "middle");
    s += "  <rect x=\"" + format_double(x0) + "\" y=\"" + format_double(margin) + "\" width=\"" +
         format_double(chart) + "\" height=\"" + format_double(chart) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int m = 0; m < m_count; ++m) {
        const ReliabilityBin& b = rel.bins[m];
        const double x = x0 + m * bar_w;
        const double acc_h = b.accuracy * chart;
        const double conf_h = b.avg_confidence * chart;
        s += "  <rect class=\"acc\" data-accuracy=\"" + format_double(b.accuracy) +
             "\" data-count=\"" + std::to_string(b.count) + "\" x=\"" + format_double(x) +
             "\" y=\"" + format_double(y0 - acc_h) + "\" width=\"" + format_double(bar_w) +
             "\" height=\"" + format_double(acc_h) +
             "\" fill=\"steelblue\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
        // Gap overlay between accuracy and average confidence.
        if (b.count > 0 && conf_h != acc_h) {
            const double top = y0 - std::max(acc_h, conf_h);
            const double gh = std::abs(conf_h - acc_h);
            s += "  <rect class=\"gap\" data-gap=\"" + format_double(b.gap) + "\" x=\"" +
                 format_double(x) + "\" y=\"" + format_double(top) + "\" width=\"" +
                 format_double(bar_w) + "\" height=\"" + format_double(gh) +
                 "\" fill=\"crimson\" fill-opacity=\"0.35\"/>\n";
        }
    }
    s += "  <line x1=\"" + format_double(x0) + "\" y1=\"" + format_double(y0) + "\" x2=\"" +
         format_double(x0 + chart) + "\" y2=\"" + format_double(margin) +
         "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    detail::svg_text(s, x0, y0 + 16.0, "0");
    detail::svg_text(s, x0 + chart, y0 + 16.0, "1", "end");
    detail::svg_text(s, width / 2, y0 + 16.0,
                     "ECE " + format_double(rel.ece) + "  MCE " + format_double(rel.mce),
                     "middle");
    s += "</svg>\n";
    return s;
}

inline std::string render_histogram_svg(const std::vector<std::int64_t>& counts,
                                        const std::string& title) {
    const double margin = 40.0;
    const double chart = kSvgChartHeight;
    const double width = chart + 2 * margin;
    const double height = chart + 2 * margin;
    const double x0 = margin;
    const double y0 = margin + chart;
    std::int64_t peak = 1;
    for (std::int64_t c : counts) peak = std::max(peak, c);
    const double bar_w = counts.empty() ? chart : chart / static_cast<double>(counts.size());

    std::string s;
    detail::svg_open(s, width, height);
    detail::svg_text(s, width / 2, margin / 2, title, "middle");
    s += "  <rect x=\"" + format_double(x0) + "\" y=\"" + format_double(margin) + "\" width=\"" +
         format_double(chart) + "\" height=\"" + format_double(chart) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double h = chart * static_cast<double>(counts[k]) / static_cast<double>(peak);
        s += "  <rect class=\"bar\" data-count=\"" + std::to_string(counts[k]) + "\" x=\"" +
             format_double(x0 + k * bar_w) + "\" y=\"" + format_double(y0 - h) + "\" width=\"" +
             format_double(bar_w) + "\" height=\"" + format_double(h) +
             "\" fill=\"darkorange\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    }
    detail::svg_text(s, x0, y0 + 16.0, "0");
    detail::svg_text(s, x0 + chart, y0 + 16.0, "1", "end");
    s += "</svg>\n";
    return s;
}

} // namespace probcal
