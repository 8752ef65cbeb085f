#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fairaudit/viz.hpp"

// Deliberately small renderer: axes, bars, points, lines, and the epsilon
// band. Styling parity with any particular plotting library is a non-goal.

namespace fairaudit {

namespace {

constexpr double kW = 680, kH = 440;
constexpr double kLeft = 150, kRight = 20, kTop = 40, kBottom = 40;

const char* kColors[8] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52",
                          "#8172b3", "#937860", "#da8bc3", "#8c8c8c"};

std::string fmt(double v) {
    std::ostringstream o;
    o.precision(4);
    o << v;
    return o.str();
}

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Canvas {
    std::ostringstream body;

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0, bool dashed = false) {
        body << "<line x1='" << fmt(x1) << "' y1='" << fmt(y1) << "' x2='" << fmt(x2) << "' y2='"
             << fmt(y2) << "' stroke='" << stroke << "' stroke-width='" << fmt(width) << "'";
        if (dashed) body << " stroke-dasharray='5,4'";
        body << "/>\n";
    }
    void rect(double x, double y, double w, double h, const std::string& fill,
              double opacity = 1.0) {
        if (w < 0) { x += w; w = -w; }
        if (h < 0) { y += h; h = -h; }
        body << "<rect x='" << fmt(x) << "' y='" << fmt(y) << "' width='" << fmt(w) << "' height='"
             << fmt(h) << "' fill='" << fill << "' fill-opacity='" << fmt(opacity) << "'/>\n";
    }
    void circle(double x, double y, double r, const std::string& fill) {
        body << "<circle cx='" << fmt(x) << "' cy='" << fmt(y) << "' r='" << fmt(r) << "' fill='"
             << fill << "'/>\n";
    }
    void text(double x, double y, const std::string& t, double size = 11,
              const std::string& anchor = "start") {
        body << "<text x='" << fmt(x) << "' y='" << fmt(y) << "' font-size='" << fmt(size)
             << "' font-family='sans-serif' text-anchor='" << anchor << "'>" << esc(t)
             << "</text>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke) {
        body << "<polyline fill='none' stroke='" << stroke << "' stroke-width='1.5' points='";
        for (const auto& [x, y] : pts) body << fmt(x) << "," << fmt(y) << " ";
        body << "'/>\n";
    }
    void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& stroke) {
        body << "<polygon fill='" << stroke << "' fill-opacity='0.15' stroke='" << stroke
             << "' points='";
        for (const auto& [x, y] : pts) body << fmt(x) << "," << fmt(y) << " ";
        body << "'/>\n";
    }

    std::string finish(const std::string& title) {
        std::ostringstream out;
        out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
            << "' viewBox='0 0 " << kW << " " << kH << "'>\n";
        out << "<rect x='0' y='0' width='" << kW << "' height='" << kH << "' fill='white'/>\n";
        out << "<text x='" << kW / 2 << "' y='22' font-size='14' font-family='sans-serif'"
            << " text-anchor='middle'>" << esc(title) << "</text>\n";
        out << body.str() << "</svg>\n";
        return out.str();
    }
};

struct Scale {
    double lo = 0, hi = 1, a = 0, b = 1;  // data range -> pixel range
    double operator()(double v) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

Scale xscale(double lo, double hi) {
    if (hi <= lo) hi = lo + 1;
    return {lo, hi, kLeft, kW - kRight};
}
Scale yscale(double lo, double hi) {
    if (hi <= lo) hi = lo + 1;
    return {lo, hi, kH - kBottom, kTop};  // inverted
}

void draw_frame(Canvas& c, const Scale& xs, const Scale& ys, const std::string& xlabel,
                const std::string& ylabel) {
    c.line(kLeft, kH - kBottom, kW - kRight, kH - kBottom, "#333333");
    c.line(kLeft, kTop, kLeft, kH - kBottom, "#333333");
    c.text(kLeft, kH - kBottom + 14, fmt(xs.lo), 10);
    c.text(kW - kRight, kH - kBottom + 14, fmt(xs.hi), 10, "end");
    c.text(kLeft - 4, kH - kBottom, fmt(ys.lo), 10, "end");
    c.text(kLeft - 4, kTop + 8, fmt(ys.hi), 10, "end");
    c.text((kLeft + kW - kRight) / 2, kH - 8, xlabel, 11, "middle");
    c.text(14, kTop - 10, ylabel, 11);
}

std::string label_of(const PlotPoint& p) {
    std::string out;
    for (const auto& [k, v] : p.labels) {
        if (k == "privileged" || k == "check" || k == "verdict") continue;
        if (!out.empty()) out += " / ";
        out += v;
    }
    return out;
}

int color_index(std::map<std::string, int>& seen, const std::string& key) {
    auto it = seen.find(key);
    if (it != seen.end()) return it->second;
    const int idx = static_cast<int>(seen.size()) % 8;
    seen.emplace(key, idx);
    return idx;
}

// horizontal bar rows; value taken from values[value_idx], bars start at base
std::string render_bars(const PlotSeries& s, std::size_t value_idx, double base,
                        const std::string& title, const ordered_json* band) {
    double lo = base, hi = base;
    for (const auto& p : s.points)
        if (!p.missing) {
            lo = std::min(lo, p.values[value_idx]);
            hi = std::max(hi, p.values[value_idx]);
        }
    if (band) {
        lo = std::min(lo, (*band)[0].get<double>());
        hi = std::max(hi, (*band)[1].get<double>());
    }
    const double pad = 0.05 * (hi - lo + 1e-9);
    Scale xs = xscale(lo - pad, hi + pad);

    Canvas c;
    const double rows = static_cast<double>(s.points.size());
    const double rh = (kH - kTop - kBottom) / std::max(rows, 1.0);
    if (band)
        c.rect(xs((*band)[0].get<double>()), kTop, xs((*band)[1].get<double>()) -
               xs((*band)[0].get<double>()), kH - kTop - kBottom, "#9be29b", 0.35);

    std::map<std::string, int> colors;
    double y = kTop;
    for (const auto& p : s.points) {
        const std::string lbl = label_of(p);
        c.text(kLeft - 6, y + rh * 0.65, lbl, 9, "end");
        if (!p.missing) {
            const auto model_it = p.labels.find("model");
            const int ci = color_index(colors, model_it != p.labels.end() ? model_it->second : lbl);
            c.rect(xs(base), y + rh * 0.15, xs(p.values[value_idx]) - xs(base), rh * 0.7,
                   kColors[ci], 0.9);
        } else {
            c.text(xs(base) + 4, y + rh * 0.65, "undefined", 9);
        }
        y += rh;
    }
    c.line(xs(base), kTop, xs(base), kH - kBottom, "#333333");
    c.text(kLeft, kH - kBottom + 14, fmt(lo), 10);
    c.text(kW - kRight, kH - kBottom + 14, fmt(hi), 10, "end");
    return c.finish(title);
}

std::string render_scatter(const PlotSeries& s, const std::string& title) {
    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    bool first = true;
    for (const auto& p : s.points) {
        if (p.missing || p.values.size() < 2) continue;
        if (first) { xlo = xhi = p.values[0]; ylo = yhi = p.values[1]; first = false; }
        xlo = std::min(xlo, p.values[0]); xhi = std::max(xhi, p.values[0]);
        ylo = std::min(ylo, p.values[1]); yhi = std::max(yhi, p.values[1]);
    }
    const double xpad = 0.08 * (xhi - xlo + 1e-9), ypad = 0.08 * (yhi - ylo + 1e-9);
    Scale xs = xscale(xlo - xpad, xhi + xpad), ys = yscale(ylo - ypad, yhi + ypad);
    Canvas c;
    draw_frame(c, xs, ys, s.axes.size() > 0 ? s.axes[0].name : "",
               s.axes.size() > 1 ? s.axes[1].name : "");
    std::map<std::string, int> colors;
    for (const auto& p : s.points) {
        if (p.missing || p.values.size() < 2) continue;
        const int ci = color_index(colors, label_of(p));
        c.circle(xs(p.values[0]), ys(p.values[1]), 4, kColors[ci]);
        c.text(xs(p.values[0]) + 6, ys(p.values[1]) + 3, label_of(p), 9);
    }
    return c.finish(title);
}

std::string render_lines(const PlotSeries& s, const std::string& title) {
    // group points into lines by their full label set
    std::map<std::string, std::vector<std::pair<double, double>>> lines;
    double xlo = 1, xhi = 0, ylo = 0, yhi = 0;
    bool first = true;
    for (const auto& p : s.points) {
        if (p.missing || p.values.size() < 2) continue;
        lines[label_of(p)].push_back({p.values[0], p.values[1]});
        if (first) { xlo = xhi = p.values[0]; ylo = yhi = p.values[1]; first = false; }
        xlo = std::min(xlo, p.values[0]); xhi = std::max(xhi, p.values[0]);
        ylo = std::min(ylo, p.values[1]); yhi = std::max(yhi, p.values[1]);
    }
    Scale xs = xscale(xlo, xhi), ys = yscale(ylo, yhi + 0.05 * (yhi - ylo + 1e-9));
    Canvas c;
    draw_frame(c, xs, ys, s.axes.size() > 0 ? s.axes[0].name : "",
               s.axes.size() > 1 ? s.axes[1].name : "");
    std::map<std::string, int> colors;
    double legend_y = kTop + 4;
    for (auto& [key, pts] : lines) {
        std::sort(pts.begin(), pts.end());
        std::vector<std::pair<double, double>> px;
        px.reserve(pts.size());
        for (const auto& [x, y] : pts) px.push_back({xs(x), ys(y)});
        const int ci = color_index(colors, key);
        c.polyline(px, kColors[ci]);
        c.text(kW - kRight - 150, legend_y, key, 9);
        c.line(kW - kRight - 170, legend_y - 3, kW - kRight - 155, legend_y - 3, kColors[ci], 2);
        legend_y += 12;
    }
    if (s.annotations.contains("argmin_cutoff")) {
        const double ax = xs(s.annotations["argmin_cutoff"].get<double>());
        c.line(ax, kTop, ax, kH - kBottom, "#444444", 1.0, true);
        c.text(ax + 4, kTop + 12, "min", 9);
    }
    return c.finish(title);
}

std::string render_heatmap(const PlotSeries& s, const std::string& title) {
    std::vector<std::string> models, metrics;
    for (const auto& p : s.points) {
        const auto& m = p.labels.at("model");
        const auto& k = p.labels.at("metric");
        if (std::find(models.begin(), models.end(), m) == models.end()) models.push_back(m);
        if (std::find(metrics.begin(), metrics.end(), k) == metrics.end()) metrics.push_back(k);
    }
    double lo = 0, hi = 0;
    bool first = true;
    for (const auto& p : s.points)
        if (!p.missing) {
            if (first) { lo = hi = p.values[0]; first = false; }
            lo = std::min(lo, p.values[0]);
            hi = std::max(hi, p.values[0]);
        }
    const double cw = (kW - kLeft - kRight) / std::max<double>(metrics.size(), 1);
    const double ch = (kH - kTop - kBottom) / std::max<double>(models.size(), 1);
    Canvas c;
    for (const auto& p : s.points) {
        const auto mi = std::find(models.begin(), models.end(), p.labels.at("model")) - models.begin();
        const auto ki = std::find(metrics.begin(), metrics.end(), p.labels.at("metric")) - metrics.begin();
        const double x = kLeft + static_cast<double>(ki) * cw;
        const double y = kTop + static_cast<double>(mi) * ch;
        if (p.missing) {
            c.rect(x, y, cw - 1, ch - 1, "#eeeeee");
            c.text(x + cw / 2, y + ch / 2, "-", 9, "middle");
        } else {
            const double t = hi > lo ? (p.values[0] - lo) / (hi - lo) : 0.0;
            const int shade = static_cast<int>(235 - t * 180);
            std::ostringstream col;
            col << "rgb(" << 255 << "," << shade << "," << shade << ")";
            c.rect(x, y, cw - 1, ch - 1, col.str());
            c.text(x + cw / 2, y + ch / 2 + 3, fmt(p.values[0]), 8, "middle");
        }
    }
    for (std::size_t i = 0; i < models.size(); ++i)
        c.text(kLeft - 6, kTop + (static_cast<double>(i) + 0.6) * ch, models[i], 9, "end");
    for (std::size_t i = 0; i < metrics.size(); ++i)
        c.text(kLeft + (static_cast<double>(i) + 0.5) * cw, kH - kBottom + 14, metrics[i], 9,
               "middle");
    return c.finish(title);
}

std::string render_radar(const PlotSeries& s, const std::string& title) {
    std::vector<std::string> metrics;
    std::map<std::string, std::map<std::string, double>> by_model;
    double hi = 0;
    for (const auto& p : s.points) {
        const auto& k = p.labels.at("metric");
        if (std::find(metrics.begin(), metrics.end(), k) == metrics.end()) metrics.push_back(k);
        if (!p.missing) {
            by_model[p.labels.at("model")][k] = p.values[0];
            hi = std::max(hi, p.values[0]);
        }
    }
    if (hi <= 0) hi = 1;
    const double cx = kW / 2, cy = (kH + kTop - kBottom) / 2;
    const double radius = std::min(kW - kLeft - kRight, kH - kTop - kBottom) / 2 - 10;
    Canvas c;
    const std::size_t k = metrics.size();
    for (std::size_t i = 0; i < k; ++i) {
        const double ang = 2 * 3.14159265358979 * static_cast<double>(i) / static_cast<double>(k) -
                           3.14159265358979 / 2;
        c.line(cx, cy, cx + radius * std::cos(ang), cy + radius * std::sin(ang), "#cccccc");
        c.text(cx + (radius + 12) * std::cos(ang), cy + (radius + 12) * std::sin(ang), metrics[i],
               9, "middle");
    }
    std::map<std::string, int> colors;
    double legend_y = kTop;
    for (const auto& [model, vals] : by_model) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < k; ++i) {
            const double ang = 2 * 3.14159265358979 * static_cast<double>(i) /
                                   static_cast<double>(k) - 3.14159265358979 / 2;
            const auto it = vals.find(metrics[i]);
            const double r = it == vals.end() ? 0.0 : radius * it->second / hi;
            pts.push_back({cx + r * std::cos(ang), cy + r * std::sin(ang)});
        }
        const int ci = color_index(colors, model);
        c.polygon(pts, kColors[ci]);
        c.text(kLeft, legend_y, model, 10);
        c.line(kLeft - 20, legend_y - 3, kLeft - 5, legend_y - 3, kColors[ci], 3);
        legend_y += 14;
    }
    return c.finish(title);
}

std::string render_density(const PlotSeries& s, const std::string& title) {
    double yhi = 0;
    for (const auto& p : s.points)
        if (!p.missing && p.values.size() == 3) yhi = std::max(yhi, p.values[2]);
    Scale xs = xscale(0, 1), ys = yscale(0, yhi * 1.08 + 1e-9);
    Canvas c;
    draw_frame(c, xs, ys, "score", "fraction");
    std::map<std::string, int> colors;
    double legend_y = kTop + 4;
    std::map<std::string, bool> seen;
    for (const auto& p : s.points) {
        if (p.missing || p.values.size() != 3) continue;
        const std::string& level = p.labels.at("level");
        const int ci = color_index(colors, level);
        c.rect(xs(p.values[0]), ys(p.values[2]), xs(p.values[1]) - xs(p.values[0]),
               ys(0) - ys(p.values[2]), kColors[ci], 0.45);
        if (!seen[level]) {
            seen[level] = true;
            c.text(kW - kRight - 120, legend_y, level, 9);
            c.line(kW - kRight - 140, legend_y - 3, kW - kRight - 125, legend_y - 3, kColors[ci], 3);
            legend_y += 12;
        }
    }
    return c.finish(title);
}

}  // namespace

std::string render_svg(const PlotSeries& s) {
    const std::string title = to_string(s.kind);
    switch (s.kind) {
        case PlotKind::fairness_check_bars: {
            const ordered_json band = s.annotations.contains("band") ? s.annotations["band"]
                                                                     : ordered_json{0.8, 1.25};
            return render_bars(s, 0, 1.0, title, &band);
        }
        case PlotKind::metric_scores:
        case PlotKind::choose_metric:
        case PlotKind::stack_metrics:
        case PlotKind::group_metric:
            return render_bars(s, 0, 0.0, title, nullptr);
        case PlotKind::radar:
            return render_radar(s, title);
        case PlotKind::heatmap:
            return render_heatmap(s, title);
        case PlotKind::pca:
        case PlotKind::performance_and_fairness:
            return render_scatter(s, title);
        case PlotKind::density:
            return render_density(s, title);
        case PlotKind::all_cutoffs:
        case PlotKind::ceteris_paribus_cutoff:
            return render_lines(s, title);
    }
    throw std::logic_error("unreachable plot kind");
}

}  // namespace fairaudit
