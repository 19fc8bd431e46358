#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ltddm/event_stream.hpp"

namespace ltddm {

namespace detail {

inline std::string svg_num(double v) {
    std::ostringstream os;
    os.precision(2);
    os << std::fixed << v;
    return os.str();
}

}  // namespace detail

/// Learning curve: epoch index against squared timing error, with an
/// optional dashed vertical line at the convergence epoch.
inline std::string svg_learning_curve(const std::vector<double>& ste,
                                      std::optional<std::size_t> convergence_epoch,
                                      const std::string& title = "STE per epoch") {
    const double width = 640.0;
    const double height = 400.0;
    const double margin = 48.0;
    const double plot_w = width - 2 * margin;
    const double plot_h = height - 2 * margin;
    const std::size_t n = ste.size();
    double max_v = 1.0;
    for (double v : ste) max_v = std::max(max_v, v);

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::svg_num(width) +
           "\" height=\"" + detail::svg_num(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + detail::svg_num(width / 2) + "\" y=\"24\" text-anchor=\"middle\">" +
           title + "</text>\n";
    out += "<line x1=\"" + detail::svg_num(margin) + "\" y1=\"" + detail::svg_num(height - margin) +
           "\" x2=\"" + detail::svg_num(width - margin) + "\" y2=\"" +
           detail::svg_num(height - margin) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + detail::svg_num(margin) + "\" y1=\"" + detail::svg_num(margin) +
           "\" x2=\"" + detail::svg_num(margin) + "\" y2=\"" + detail::svg_num(height - margin) +
           "\" stroke=\"black\"/>\n";
    auto x_of = [&](std::size_t i) {
        return n <= 1 ? margin : margin + plot_w * static_cast<double>(i) /
                                              static_cast<double>(n - 1);
    };
    auto y_of = [&](double v) { return height - margin - plot_h * (v / max_v); };
    out += "<polyline fill=\"none\" stroke=\"#c02020\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += detail::svg_num(x_of(i)) + "," + detail::svg_num(y_of(ste[i]));
    }
    out += "\"/>\n";
    if (convergence_epoch && *convergence_epoch < n) {
        const double x = x_of(*convergence_epoch);
        out += "<line x1=\"" + detail::svg_num(x) + "\" y1=\"" + detail::svg_num(margin) +
               "\" x2=\"" + detail::svg_num(x) + "\" y2=\"" + detail::svg_num(height - margin) +
               "\" stroke=\"#404040\" stroke-dasharray=\"6,4\"/>\n";
    }
    out += "<text x=\"" + detail::svg_num(width - margin) + "\" y=\"" +
           detail::svg_num(height - margin + 28) + "\" text-anchor=\"end\">epoch</text>\n";
    out += "<text x=\"" + detail::svg_num(margin) + "\" y=\"" + detail::svg_num(margin - 8) +
           "\">" + detail::svg_num(max_v) + "</text>\n";
    out += "</svg>\n";
    return out;
}

/// Raster of ground truth against prediction, one row pair per stream.
inline std::string svg_raster(const std::vector<std::string>& names,
                              const std::vector<EventStream>& targets,
                              const std::vector<EventStream>& predictions) {
    const double cell = 6.0;
    const double row_h = 10.0;
    const double label_w = 90.0;
    const Step T = targets.empty() ? 0 : targets.front().size();
    const double width = label_w + cell * static_cast<double>(T) + 16.0;
    const double height = 24.0 + static_cast<double>(targets.size()) * (2 * row_h + 10.0);

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::svg_num(width) +
           "\" height=\"" + detail::svg_num(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    double y = 16.0;
    for (std::size_t s = 0; s < targets.size(); ++s) {
        out += "<text x=\"4\" y=\"" + detail::svg_num(y + row_h) + "\" font-size=\"9\">" +
               (s < names.size() ? names[s] : "stream" + std::to_string(s)) + "</text>\n";
        for (Step t = 0; t < T; ++t) {
            if (targets[s].on(t)) {
                out += "<rect x=\"" + detail::svg_num(label_w + cell * static_cast<double>(t)) +
                       "\" y=\"" + detail::svg_num(y) + "\" width=\"" + detail::svg_num(cell) +
                       "\" height=\"" + detail::svg_num(row_h) + "\" fill=\"#9a9a9a\"/>\n";
            }
            if (s < predictions.size() && predictions[s].on(t)) {
                out += "<rect x=\"" + detail::svg_num(label_w + cell * static_cast<double>(t)) +
                       "\" y=\"" + detail::svg_num(y + row_h) + "\" width=\"" +
                       detail::svg_num(cell) + "\" height=\"" + detail::svg_num(row_h) +
                       "\" fill=\"#c02020\"/>\n";
            }
        }
        y += 2 * row_h + 10.0;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace ltddm
