#pragma once

// Static SVG charts over aggregate.csv rows: one log-scale DPS curve per
// topology (mean with 95% CI band) and grouped bar charts of correctness
// and num_correct at checkpoint episodes.

#include "bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace mosp {

/// Exact zeros cannot be drawn on a log axis; they are shown at this floor.
inline constexpr double kDpsLogFloor = 1e-20;

namespace detail {

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Frame {
    double width = 640, height = 400;
    double left = 70, right = 20, top = 40, bottom = 50;
    double plot_w() const { return width - left - right; }
    double plot_h() const { return height - top - bottom; }
};

inline void svg_open(std::ostream& out, const Frame& f, std::string_view title) {
    out << R"(<?xml version="1.0" encoding="UTF-8"?>)" << '\n'
        << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << f.width << R"(" height=")" << f.height
        << R"(" viewBox="0 0 )" << f.width << ' ' << f.height << R"(" font-family="sans-serif" font-size="12">)"
        << '\n'
        << R"(<rect x="0" y="0" width=")" << f.width << R"(" height=")" << f.height << R"(" fill="white"/>)" << '\n'
        << R"(<text x=")" << fmt(f.width / 2) << R"(" y="22" text-anchor="middle" font-size="15">)"
        << xml_escape(title) << "</text>\n"
        << R"(<rect x=")" << f.left << R"(" y=")" << f.top << R"(" width=")" << f.plot_w() << R"(" height=")"
        << f.plot_h() << R"(" fill="none" stroke="black"/>)" << '\n';
}

inline double clamp_log(double v) { return std::log10(std::max(v, kDpsLogFloor)); }

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
    return colors[i % 6];
}

}  // namespace detail

/// DPS mean (log y-axis) versus episode with the CI band shaded.
inline void write_dps_svg(std::ostream& out, std::string_view topology, const std::vector<AggregateRow>& dps_rows) {
    using namespace detail;
    Frame f;
    svg_open(out, f, "Average DPS, " + std::string(topology));

    std::size_t max_ep = 1;
    double hi_log = 0.0;
    for (const auto& r : dps_rows) {
        max_ep = std::max(max_ep, r.episode);
        if (std::isfinite(r.mean)) hi_log = std::max(hi_log, std::ceil(clamp_log(r.mean + r.ci95_halfwidth)));
    }
    const double lo_log = std::log10(kDpsLogFloor);
    auto x_of = [&](double ep) { return f.left + (max_ep > 1 ? (ep - 1) / double(max_ep - 1) : 0.5) * f.plot_w(); };
    auto y_of = [&](double lg) { return f.top + (hi_log - lg) / (hi_log - lo_log) * f.plot_h(); };

    for (double d = lo_log; d <= hi_log; d += 2) {
        out << R"(<line x1=")" << f.left << R"(" x2=")" << fmt(f.left + f.plot_w()) << R"(" y1=")" << fmt(y_of(d))
            << R"(" y2=")" << fmt(y_of(d)) << R"(" stroke="#dddddd"/>)" << '\n'
            << R"(<text x=")" << fmt(f.left - 6) << R"(" y=")" << fmt(y_of(d) + 4) << R"(" text-anchor="end">1e)"
            << static_cast<int>(d) << "</text>\n";
    }
    for (std::size_t t = 0; t <= 5; ++t) {
        const double ep = 1 + (max_ep - 1) * t / 5.0;
        out << R"(<text x=")" << fmt(x_of(ep)) << R"(" y=")" << fmt(f.top + f.plot_h() + 18)
            << R"(" text-anchor="middle">)" << static_cast<long>(std::lround(ep)) << "</text>\n";
    }
    out << R"(<text x=")" << fmt(f.left + f.plot_w() / 2) << R"(" y=")" << fmt(f.height - 10)
        << R"(" text-anchor="middle">episode</text>)" << '\n'
        << R"(<text x="16" y=")" << fmt(f.top + f.plot_h() / 2) << R"(" text-anchor="middle" transform="rotate(-90 16 )"
        << fmt(f.top + f.plot_h() / 2) << R"lit()">DPS</text>)lit" << '\n';

    std::vector<const AggregateRow*> rows;
    for (const auto& r : dps_rows)
        if (std::isfinite(r.mean)) rows.push_back(&r);
    std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->episode < b->episode; });
    if (!rows.empty()) {
        std::ostringstream band;
        for (auto* r : rows) band << fmt(x_of(r->episode)) << ',' << fmt(y_of(clamp_log(r->mean + r->ci95_halfwidth))) << ' ';
        for (auto it = rows.rbegin(); it != rows.rend(); ++it)
            band << fmt(x_of((*it)->episode)) << ',' << fmt(y_of(clamp_log((*it)->mean - (*it)->ci95_halfwidth))) << ' ';
        out << R"(<polygon points=")" << band.str() << R"(" fill="#1f77b4" fill-opacity="0.2" stroke="none"/>)" << '\n';
        std::ostringstream line;
        for (auto* r : rows) line << fmt(x_of(r->episode)) << ',' << fmt(y_of(clamp_log(r->mean))) << ' ';
        out << R"(<polyline points=")" << line.str() << R"(" fill="none" stroke="#1f77b4" stroke-width="2"/>)" << '\n';
    }
    out << "</svg>\n";
}

/// Grouped bars: one group per checkpoint, one bar per topology, CI whiskers.
inline void write_bar_svg(std::ostream& out, std::string_view title, std::string_view metric,
                          const std::vector<AggregateRow>& rows, std::span<const std::size_t> checkpoints,
                          double y_max) {
    using namespace detail;
    Frame f;
    svg_open(out, f, title);
    std::vector<std::string> topologies;
    for (const auto& r : rows)
        if (r.metric == metric && std::find(topologies.begin(), topologies.end(), r.topology) == topologies.end())
            topologies.push_back(r.topology);
    auto value = [&](const std::string& topo, std::size_t ep) -> const AggregateRow* {
        for (const auto& r : rows)
            if (r.metric == metric && r.topology == topo && r.episode == ep) return &r;
        return nullptr;
    };
    auto y_of = [&](double v) { return f.top + (1.0 - std::clamp(v / y_max, 0.0, 1.0)) * f.plot_h(); };
    for (int t = 0; t <= 4; ++t) {
        const double v = y_max * t / 4.0;
        out << R"(<text x=")" << fmt(f.left - 6) << R"(" y=")" << fmt(y_of(v) + 4) << R"(" text-anchor="end">)"
            << fmt(v) << "</text>\n";
    }
    const double group_w = f.plot_w() / std::max<std::size_t>(1, checkpoints.size());
    const double bar_w = group_w * 0.8 / std::max<std::size_t>(1, topologies.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        const double gx = f.left + c * group_w + group_w * 0.1;
        out << R"(<text x=")" << fmt(f.left + (c + 0.5) * group_w) << R"(" y=")" << fmt(f.top + f.plot_h() + 18)
            << R"(" text-anchor="middle">)" << checkpoints[c] << "</text>\n";
        for (std::size_t t = 0; t < topologies.size(); ++t) {
            const AggregateRow* r = value(topologies[t], checkpoints[c]);
            if (!r || !std::isfinite(r->mean)) continue;
            const double x = gx + t * bar_w;
            out << R"(<rect x=")" << fmt(x) << R"(" y=")" << fmt(y_of(r->mean)) << R"(" width=")" << fmt(bar_w * 0.9)
                << R"(" height=")" << fmt(f.top + f.plot_h() - y_of(r->mean)) << R"(" fill=")" << palette(t)
                << R"("/>)" << '\n';
            const double cx = x + bar_w * 0.45;
            out << R"(<line x1=")" << fmt(cx) << R"(" x2=")" << fmt(cx) << R"(" y1=")"
                << fmt(y_of(r->mean - r->ci95_halfwidth)) << R"(" y2=")" << fmt(y_of(r->mean + r->ci95_halfwidth))
                << R"(" stroke="black"/>)" << '\n';
        }
    }
    for (std::size_t t = 0; t < topologies.size(); ++t) {
        const double ly = f.top + 10 + 16 * t;
        out << R"(<rect x=")" << fmt(f.left + f.plot_w() - 110) << R"(" y=")" << fmt(ly) << R"(" width="10" height="10" fill=")"
            << palette(t) << R"("/>)" << '\n'
            << R"(<text x=")" << fmt(f.left + f.plot_w() - 95) << R"(" y=")" << fmt(ly + 9) << R"(">)"
            << xml_escape(topologies[t]) << "</text>\n";
    }
    out << R"(<text x=")" << fmt(f.left + f.plot_w() / 2) << R"(" y=")" << fmt(f.height - 10)
        << R"(" text-anchor="middle">episode</text>)" << '\n';
    out << "</svg>\n";
}

/// Renders dps_<topology>.svg for each topology plus correctness.svg and
/// num_correct.svg into out_dir. Returns the written paths.
inline std::vector<std::filesystem::path> emit_plots(const std::vector<AggregateRow>& rows,
                                                     const std::filesystem::path& out_dir,
                                                     std::span<const std::size_t> checkpoints) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create '" + out_dir.string() + "': " + ec.message());

    std::vector<std::string> order;
    std::map<std::string, std::vector<AggregateRow>> dps;
    for (const auto& r : rows) {
        if (std::find(order.begin(), order.end(), r.topology) == order.end()) order.push_back(r.topology);
        if (r.metric == "dps") dps[r.topology].push_back(r);
    }
    std::vector<std::filesystem::path> written;
    for (const auto& topo : order) {
        auto path = out_dir / ("dps_" + topo + ".svg");
        auto out = detail::open_output(path);
        write_dps_svg(out, topo, dps[topo]);
        written.push_back(path);
    }
    std::size_t k = 1;
    for (const auto& r : rows)
        if (r.metric == "num_correct" && std::isfinite(r.mean)) k = std::max<std::size_t>(k, std::ceil(r.mean + r.ci95_halfwidth));
    k = std::max<std::size_t>(k, kDefaultAttributes);
    {
        auto path = out_dir / "correctness.svg";
        auto out = detail::open_output(path);
        write_bar_svg(out, "Average correctness", "correctness", rows, checkpoints, 1.0);
        written.push_back(path);
    }
    {
        auto path = out_dir / "num_correct.svg";
        auto out = detail::open_output(path);
        write_bar_svg(out, "Average number of correct solutions", "num_correct", rows, checkpoints,
                      static_cast<double>(k));
        written.push_back(path);
    }
    return written;
}

}  // namespace mosp
