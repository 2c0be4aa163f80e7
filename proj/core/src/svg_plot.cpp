#include "rp/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace rp {

namespace {

// Fixed-precision coordinates keep the byte stream reproducible.
std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace

std::string render_pr_proper_action_svg(const std::vector<MetricsRecord>& records,
                                        const std::string& title) {
    if (records.empty()) {
        throw std::invalid_argument("render_pr_proper_action_svg: no records");
    }

    constexpr double W = 860, H = 520;
    constexpr double L = 70, R = 30, T = 40, B = 60; // margins
    const double plot_w = W - L - R;
    const double plot_h = H - T - B;

    const double x_max = double(records.back().epoch);
    const double x_min = double(records.front().epoch);
    const double x_span = std::max(x_max - x_min, 1.0);

    auto x_of = [&](double epoch) { return L + (epoch - x_min) / x_span * plot_w; };
    auto y_of = [&](double pr) { return T + (1.0 - pr) * plot_h; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(W) + "\" height=\"" +
           coord(H) + "\" viewBox=\"0 0 " + coord(W) + " " + coord(H) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) {
        svg += "<text x=\"" + coord(W / 2) + "\" y=\"24\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"16\">" + title + "</text>\n";
    }

    // Axes.
    svg += "<line x1=\"" + coord(L) + "\" y1=\"" + coord(T) + "\" x2=\"" + coord(L) + "\" y2=\"" +
           coord(T + plot_h) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + coord(L) + "\" y1=\"" + coord(T + plot_h) + "\" x2=\"" +
           coord(L + plot_w) + "\" y2=\"" + coord(T + plot_h) + "\" stroke=\"black\"/>\n";

    // y ticks every 0.2 in [0,1].
    for (int k = 0; k <= 5; ++k) {
        const double v = k * 0.2;
        const double y = y_of(v);
        svg += "<line x1=\"" + coord(L - 5) + "\" y1=\"" + coord(y) + "\" x2=\"" + coord(L) +
               "\" y2=\"" + coord(y) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + coord(L - 10) + "\" y=\"" + coord(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
               tick_label(v) + "</text>\n";
        if (k > 0 && k < 5) {
            svg += "<line x1=\"" + coord(L) + "\" y1=\"" + coord(y) + "\" x2=\"" +
                   coord(L + plot_w) + "\" y2=\"" + coord(y) +
                   "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
        }
    }

    // x ticks: 6 evenly spaced epoch marks.
    for (int k = 0; k <= 5; ++k) {
        const double e = x_min + x_span * k / 5.0;
        const double x = x_of(e);
        svg += "<line x1=\"" + coord(x) + "\" y1=\"" + coord(T + plot_h) + "\" x2=\"" + coord(x) +
               "\" y2=\"" + coord(T + plot_h + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + coord(x) + "\" y=\"" + coord(T + plot_h + 20) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
               tick_label(double(std::llround(e))) + "</text>\n";
    }

    svg += "<text x=\"" + coord(L + plot_w / 2) + "\" y=\"" + coord(H - 15) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">epoch</text>\n";
    svg += "<text x=\"20\" y=\"" + coord(T + plot_h / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
           "transform=\"rotate(-90 20 " + coord(T + plot_h / 2) + ")\">Pr{Proper Action}</text>\n";

    if (records.size() == 1) {
        svg += "<circle cx=\"" + coord(x_of(double(records[0].epoch))) + "\" cy=\"" +
               coord(y_of(records[0].pr_proper_action)) + "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    } else {
        std::string points;
        for (const auto& r : records) {
            points += coord(x_of(double(r.epoch))) + "," + coord(y_of(r.pr_proper_action)) + " ";
        }
        points.pop_back();
        svg += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"" +
               points + "\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace rp
