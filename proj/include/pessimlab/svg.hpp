#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pessimlab/common.hpp"
#include "pessimlab/harness.hpp"

namespace pessimlab {

struct PlotOptions {
    std::string x = "n";          // n | c_star
    std::string y = "mean";       // mean
    std::string group = "algorithm";  // algorithm | instance
    bool logx = false;
    bool logy = false;
    std::string title;
};

namespace detail {

inline std::string fmt(Real v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace detail

// Deterministic SVG: groups sorted by key, a fixed palette, polyline +
// markers per group, +-1 stderr bars. Log axes map nonpositive values to
// dropped points.
inline std::string emit_svg(const std::vector<SummaryRow>& rows, const PlotOptions& opt) {
    if (rows.empty()) throw std::invalid_argument("emit_svg: no rows");
    static const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                     "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    const int width = 800, height = 560;
    const Real ml = 70, mr = 20, mt = 40, mb = 50;

    auto x_of = [&](const SummaryRow& r) {
        return opt.x == "c_star" ? r.c_star : static_cast<Real>(r.n);
    };
    auto key_of = [&](const SummaryRow& r) {
        return opt.group == "instance" ? r.instance : r.algorithm;
    };

    std::map<std::string, std::vector<SummaryRow>> groups;
    for (const SummaryRow& r : rows) groups[key_of(r)].push_back(r);
    for (auto& [k, v] : groups)
        std::sort(v.begin(), v.end(),
                  [&](const SummaryRow& a, const SummaryRow& b) { return x_of(a) < x_of(b); });

    Real xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
    auto tx = [&](Real v) { return opt.logx ? std::log10(v) : v; };
    auto ty = [&](Real v) { return opt.logy ? std::log10(v) : v; };
    for (const SummaryRow& r : rows) {
        const Real xv = x_of(r), yv = r.mean;
        if (opt.logx && xv <= 0) continue;
        if (opt.logy && yv <= 0) continue;
        xmin = std::min(xmin, tx(xv));
        xmax = std::max(xmax, tx(xv));
        ymin = std::min(ymin, ty(yv));
        ymax = std::max(ymax, ty(yv));
    }
    if (!(xmin <= xmax) || !(ymin <= ymax))
        throw std::invalid_argument("emit_svg: no plottable points");
    if (xmax == xmin) { xmin -= 1; xmax += 1; }
    if (ymax == ymin) { ymin -= 1; ymax += 1; }
    const Real xpad = 0.04 * (xmax - xmin), ypad = 0.06 * (ymax - ymin);
    xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

    auto px = [&](Real v) { return ml + (tx(v) - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](Real v) { return height - mb - (ty(v) - ymin) / (ymax - ymin) * (height - mt - mb); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << detail::fmt(ml) << "\" y1=\"" << detail::fmt(Real(height) - mb)
        << "\" x2=\"" << detail::fmt(Real(width) - mr) << "\" y2=\""
        << detail::fmt(Real(height) - mb) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << detail::fmt(ml) << "\" y1=\"" << detail::fmt(mt) << "\" x2=\""
        << detail::fmt(ml) << "\" y2=\"" << detail::fmt(Real(height) - mb)
        << "\" stroke=\"black\"/>\n";
    if (!opt.title.empty())
        svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
            << opt.title << "</text>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << opt.x
        << (opt.logx ? " (log)" : "") << "</text>\n";
    svg << "<text x=\"16\" y=\"" << height / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << height / 2 << ")\">" << opt.y << (opt.logy ? " (log)" : "") << "</text>\n";

    std::size_t color_idx = 0;
    Real legend_y = mt + 8;
    for (const auto& [key, pts] : groups) {
        const char* color = kPalette[color_idx % 8];
        ++color_idx;
        std::ostringstream polyline;
        for (const SummaryRow& r : pts) {
            const Real xv = x_of(r), yv = r.mean;
            if ((opt.logx && xv <= 0) || (opt.logy && yv <= 0)) continue;
            polyline << detail::fmt(px(xv)) << ',' << detail::fmt(py(yv)) << ' ';
            // error bar: +-1 stderr (clipped to the axis in log scale)
            const Real hi = yv + r.stderr_;
            const Real lo = std::max(opt.logy ? yv * 1e-6 : yv - r.stderr_, yv - r.stderr_);
            if (r.stderr_ > 0 && (!opt.logy || lo > 0)) {
                svg << "<line x1=\"" << detail::fmt(px(xv)) << "\" y1=\"" << detail::fmt(py(lo))
                    << "\" x2=\"" << detail::fmt(px(xv)) << "\" y2=\"" << detail::fmt(py(hi))
                    << "\" stroke=\"" << color << "\" stroke-width=\"1\"/>\n";
            }
            svg << "<circle cx=\"" << detail::fmt(px(xv)) << "\" cy=\"" << detail::fmt(py(yv))
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const std::string pl = polyline.str();
        if (!pl.empty())
            svg << "<polyline points=\"" << pl << "\" fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.5\"/>\n";
        svg << "<text x=\"" << detail::fmt(Real(width) - mr - 6) << "\" y=\""
            << detail::fmt(legend_y) << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color
            << "\">" << key << "</text>\n";
        legend_y += 16;
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace pessimlab
