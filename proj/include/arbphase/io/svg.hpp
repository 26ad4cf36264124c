#pragma once

#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "arbphase/saddle.hpp"
#include "arbphase/sweep.hpp"

namespace arbphase::io {

// Cell-rectangle heatmap of a phase grid (x: n, y: family parameter), with
// optional analytic critical-line markers and empirical crossing markers.
// Zero-volume cells render dark, infinite-volume cells light. Output is a
// plain string assembled with fixed formatting, so bytes are deterministic.

namespace detail {

inline void appendf(std::string& s, const char* fmt, ...) {
    char buf[256];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    s += buf;
}

inline std::string ramp_color(double fraction) {
    // dark blue (zero volume) -> light blue (infinite volume)
    const int r0 = 8, g0 = 48, b0 = 107;
    const int r1 = 158, g1 = 202, b1 = 225;
    const double t = fraction < 0.0 ? 0.0 : (fraction > 1.0 ? 1.0 : fraction);
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(r0 + t * (r1 - r0) + 0.5),
                  static_cast<int>(g0 + t * (g1 - g0) + 0.5), static_cast<int>(b0 + t * (b1 - b0) + 0.5));
    return buf;
}

}  // namespace detail

inline std::string render_heatmap(const PhaseGrid& grid, const CriticalLine* analytic = nullptr,
                                  const TransitionLine* empirical = nullptr) {
    if (grid.cells.empty()) throw std::invalid_argument("render_heatmap: empty grid");
    const auto& ns = grid.spec.n_grid;
    const auto& ps = grid.spec.param_grid;

    const double margin_l = 64.0, margin_b = 46.0, margin_t = 18.0, margin_r = 150.0;
    const double cell_w = 22.0, cell_h = 22.0;
    const double plot_w = cell_w * static_cast<double>(ns.size());
    const double plot_h = cell_h * static_cast<double>(ps.size());
    const double width = margin_l + plot_w + margin_r;
    const double height = margin_t + plot_h + margin_b;

    // Cell edges at grid midpoints so markers land on true coordinates.
    const double n0 = ns.front(), n1 = ns.back();
    const double p0 = ps.front(), p1 = ps.back();
    const double n_span = ns.size() > 1 ? n1 - n0 : 1.0;
    const double p_span = ps.size() > 1 ? p1 - p0 : 1.0;
    auto x_of = [&](double n) { return margin_l + (n - n0) / n_span * (plot_w - cell_w) + cell_w / 2.0; };
    auto y_of = [&](double p) {
        return margin_t + plot_h - ((p - p0) / p_span * (plot_h - cell_h) + cell_h / 2.0);
    };

    std::string svg;
    detail::appendf(svg,
                    "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                    "viewBox=\"0 0 %.0f %.0f\">\n",
                    width, height, width, height);
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t ip = 0; ip < ps.size(); ++ip) {
        for (std::size_t in = 0; in < ns.size(); ++in) {
            const double cx = x_of(ns[in]);
            const double cy = y_of(ps[ip]);
            detail::appendf(svg, "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\"/>\n",
                            cx - cell_w / 2.0, cy - cell_h / 2.0, cell_w, cell_h,
                            detail::ramp_color(grid.fraction(ip, in)).c_str());
        }
    }

    // axes labels and ticks (first/last values)
    const char* param_label = line_param_name(grid.spec.param);
    detail::appendf(svg,
                    "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"12\" "
                    "text-anchor=\"middle\">n</text>\n",
                    margin_l + plot_w / 2.0, height - 8.0);
    detail::appendf(svg,
                    "<text x=\"14\" y=\"%.1f\" font-family=\"monospace\" font-size=\"12\" "
                    "text-anchor=\"middle\" transform=\"rotate(-90 14 %.1f)\">%s</text>\n",
                    margin_t + plot_h / 2.0, margin_t + plot_h / 2.0, param_label);
    detail::appendf(svg,
                    "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"10\" "
                    "text-anchor=\"middle\">%.3g</text>\n",
                    x_of(n0), height - margin_b + 16.0, n0);
    detail::appendf(svg,
                    "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"10\" "
                    "text-anchor=\"middle\">%.3g</text>\n",
                    x_of(n1), height - margin_b + 16.0, n1);
    detail::appendf(svg,
                    "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"10\" "
                    "text-anchor=\"end\">%.3g</text>\n",
                    margin_l - 6.0, y_of(p0) + 4.0, p0);
    detail::appendf(svg,
                    "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"10\" "
                    "text-anchor=\"end\">%.3g</text>\n",
                    margin_l - 6.0, y_of(p1) + 4.0, p1);

    if (analytic) {
        for (const auto& [param, n_c] : analytic->points) {
            if (n_c < n0 - 1e-9 || n_c > n1 + 1e-9 || param < p0 - 1e-9 || param > p1 + 1e-9) continue;
            detail::appendf(svg, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3.2\" fill=\"#d62728\"/>\n",
                            x_of(n_c), y_of(param));
        }
    }
    if (empirical) {
        for (const auto& [param, n] : empirical->points) {
            if (n < n0 - 1e-9 || n > n1 + 1e-9) continue;
            detail::appendf(svg,
                            "<rect x=\"%.2f\" y=\"%.2f\" width=\"5\" height=\"5\" fill=\"none\" "
                            "stroke=\"#ffffff\" stroke-width=\"1.2\"/>\n",
                            x_of(n) - 2.5, y_of(param) - 2.5);
        }
    }

    // legend
    const double lx = margin_l + plot_w + 16.0;
    detail::appendf(svg, "<rect x=\"%.1f\" y=\"%.1f\" width=\"14\" height=\"14\" fill=\"%s\"/>\n", lx,
                    margin_t + 4.0, detail::ramp_color(0.0).c_str());
    detail::appendf(svg,
                    "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"10\">zero volume</text>\n",
                    lx + 20.0, margin_t + 15.0);
    detail::appendf(svg, "<rect x=\"%.1f\" y=\"%.1f\" width=\"14\" height=\"14\" fill=\"%s\"/>\n", lx,
                    margin_t + 26.0, detail::ramp_color(1.0).c_str());
    detail::appendf(svg,
                    "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"10\">infinite volume</text>\n",
                    lx + 20.0, margin_t + 37.0);
    if (analytic) {
        detail::appendf(svg, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3.2\" fill=\"#d62728\"/>\n", lx + 7.0,
                        margin_t + 55.0);
        detail::appendf(svg,
                        "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"10\">analytic "
                        "n_c (%s)</text>\n",
                        lx + 20.0, margin_t + 59.0, interpretation_name(analytic->interpretation));
    }
    if (empirical) {
        detail::appendf(svg,
                        "<rect x=\"%.1f\" y=\"%.1f\" width=\"5\" height=\"5\" fill=\"none\" stroke=\"#888888\" "
                        "stroke-width=\"1.2\"/>\n",
                        lx + 4.5, margin_t + 72.0);
        detail::appendf(svg,
                        "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"10\">empirical "
                        "0.5 crossing</text>\n",
                        lx + 20.0, margin_t + 81.0);
    }

    svg += "</svg>\n";
    return svg;
}

inline void write_svg_file(const std::string& svg, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << svg;
    if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace arbphase::io
