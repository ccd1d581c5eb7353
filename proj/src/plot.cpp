#include "wban/plot.hpp"

#include "wban/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace wban {

namespace {

constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 150, kTop = 30, kBottom = 50;

const char* kColours[kNumPriorities] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                        "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::optional<double> model_value(const ResultRow& r, char metric) {
    switch (metric) {
        case 'R': return r.model_reliability;
        case 'S': return r.model_throughput;
        case 'E': return r.model_energy;
        default: return r.model_delay;
    }
}

std::optional<double> sim_value(const ResultRow& r, char metric) {
    switch (metric) {
        case 'R': return r.sim_reliability;
        case 'S': return r.sim_throughput;
        case 'E': return r.sim_energy;
        default: return r.sim_delay;
    }
}

const char* metric_label(char metric) {
    switch (metric) {
        case 'R': return "reliability";
        case 'S': return "normalized throughput";
        case 'E': return "energy per state (J)";
        default: return "access delay (s)";
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

using Series = std::vector<std::pair<double, double>>;

}  // namespace

std::string plot_svg(const ResultTable& table, char metric) {
    // series keyed by (mechanism, up)
    std::map<std::pair<int, int>, Series> model, sim;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto extend = [&](double x, double y) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    };
    for (const ResultRow& r : table) {
        const std::pair<int, int> key{static_cast<int>(r.mechanism), r.up};
        if (auto v = model_value(r, metric); v && std::isfinite(*v)) {
            model[key].emplace_back(r.value, *v);
            extend(r.value, *v);
        }
        if (auto v = sim_value(r, metric); v && std::isfinite(*v)) {
            sim[key].emplace_back(r.value, *v);
            extend(r.value, *v);
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    y0 = std::min(y0, 0.0);
    if (y1 <= y0) y1 = y0 + 1;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return kTop + ph - (y - y0) / (y1 - y0) * ph; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
        s << "<text x=\"" << px(xv) << "\" y=\"" << kTop + ph + 15
          << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
        s << "<text x=\"" << kLeft - 5 << "\" y=\"" << py(yv) + 4
          << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
    }
    const std::string xlabel = table.empty() ? "" : table.front().parameter;
    s << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    s << "<text x=\"15\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
      << kTop + ph / 2 << ")\">" << metric_label(metric) << "</text>\n";

    int legend = 0;
    for (const auto& [key, pts] : model) {
        const char* colour = kColours[key.second];
        const bool dashed = key.first == static_cast<int>(Mechanism::Basic);
        s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\""
          << (dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
        for (const auto& [x, y] : pts) s << px(x) << ',' << py(y) << ' ';
        s << "\"/>\n";
        s << "<text x=\"" << kLeft + pw + 10 << "\" y=\"" << kTop + 12 + 14 * legend++
          << "\" fill=\"" << colour << "\">UP" << key.second << ' '
          << to_string(static_cast<Mechanism>(key.first)) << "</text>\n";
    }
    for (const auto& [key, pts] : sim)
        for (const auto& [x, y] : pts)
            s << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"none\" stroke=\""
              << kColours[key.second] << "\"/>\n";
    s << "</svg>\n";
    return s.str();
}

std::vector<std::string> write_plots(const ResultTable& table, const std::string& prefix) {
    std::vector<std::string> files;
    for (auto [metric, name] : {std::pair{'R', "reliability"}, std::pair{'S', "throughput"},
                                std::pair{'E', "energy"}, std::pair{'D', "delay"}}) {
        const std::string path = prefix + "_" + name + ".svg";
        std::ofstream out(path);
        if (!out) throw Error(ErrorKind::Configuration, "cannot write plot '" + path + "'");
        out << plot_svg(table, metric);
        files.push_back(path);
    }
    return files;
}

}  // namespace wban
