#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "schelling/experiments.hpp"

namespace schelling::plots {

/// Bare-bones SVG document with fixed number formatting, so identical
/// inputs always give identical bytes.
class Svg {
public:
    Svg(double width, double height) : width_(width), height_(height) {}

    void rect(double x, double y, double w, double h, const std::string& cls) {
        body_ += "<rect class=\"" + cls + "\" x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
                 "\" height=\"" + num(h) + "\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& cls) {
        body_ += "<line class=\"" + cls + "\" x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
                 "\" y2=\"" + num(y2) + "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& cls) {
        if (pts.size() < 2) {
            return;
        }
        body_ += "<polyline class=\"" + cls + "\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            body_ += (i ? " " : "") + num(pts[i].first) + "," + num(pts[i].second);
        }
        body_ += "\"/>\n";
    }

    void circle(double x, double y, double r, const std::string& cls) {
        body_ += "<circle class=\"" + cls + "\" cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"" + num(r) + "\"/>\n";
    }

    void text(double x, double y, const std::string& s, const std::string& cls, double rotate = 0.0) {
        body_ += "<text class=\"" + cls + "\" x=\"" + num(x) + "\" y=\"" + num(y) + "\"";
        if (rotate != 0.0) {
            body_ += " transform=\"rotate(" + num(rotate) + " " + num(x) + " " + num(y) + ")\"";
        }
        body_ += ">" + escape(s) + "</text>\n";
    }

    [[nodiscard]] std::string str() const {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) + "\" height=\"" + num(height_) +
               "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) + "\">\n" + style + body_ + "</svg>\n";
    }

    static std::string num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return buf;
    }

private:
    static std::string escape(const std::string& s) {
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

    static constexpr const char* style =
        "<style>\n"
        "text{font-family:sans-serif;font-size:11px;fill:#222}\n"
        ".title{font-size:14px;text-anchor:middle}\n"
        ".tick{text-anchor:middle}\n.ytick{text-anchor:end}\n.label{text-anchor:middle}\n"
        ".axis{stroke:#222;stroke-width:1}\n.grid{stroke:#ddd;stroke-width:0.5}\n"
        ".box{fill:#9ecae1;stroke:#08519c;stroke-width:1}\n.median{stroke:#08306b;stroke-width:2}\n"
        ".whisker{stroke:#08519c;stroke-width:1}\n"
        ".series0{fill:none;stroke:#08519c;stroke-width:2}\n.series1{fill:none;stroke:#e6550d;stroke-width:1.5}\n"
        ".series2{fill:none;stroke:#31a354;stroke-width:1.5}\n"
        ".dot0{fill:#08519c}\n.dot1{fill:#e6550d}\n.dot2{fill:#31a354}\n"
        "</style>\n";

    double width_;
    double height_;
    std::string body_;
};

struct Box {
    std::string label;
    std::optional<FiveNumber> stats;
};

struct Series {
    std::string name;
    std::vector<std::optional<double>> values;
};

namespace detail {

struct Frame {
    double left = 70, right = 20, top = 40, bottom = 70;
    double width = 0, height = 0;
    double lo = 0, hi = 1;
    std::size_t slots = 1;

    [[nodiscard]] double plot_w() const { return width - left - right; }
    [[nodiscard]] double plot_h() const { return height - top - bottom; }
    [[nodiscard]] double x(std::size_t i) const { return left + plot_w() * (static_cast<double>(i) + 0.5) / static_cast<double>(slots); }
    [[nodiscard]] double y(double v) const { return top + plot_h() * (1.0 - (v - lo) / (hi - lo)); }
    [[nodiscard]] double slot_w() const { return plot_w() / static_cast<double>(slots); }
};

inline void nice_range(double& lo, double& hi) {
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
}

inline void axes(Svg& svg, const Frame& f, const std::string& title, const std::string& xlabel,
                 const std::string& ylabel, const std::vector<std::string>& labels) {
    svg.text(f.width / 2, 22, title, "title");
    for (int i = 0; i <= 5; ++i) {
        const double v = f.lo + (f.hi - f.lo) * i / 5.0;
        const double yy = f.y(v);
        svg.line(f.left, yy, f.width - f.right, yy, "grid");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        svg.text(f.left - 6, yy + 4, buf, "ytick");
    }
    svg.line(f.left, f.top, f.left, f.height - f.bottom, "axis");
    svg.line(f.left, f.height - f.bottom, f.width - f.right, f.height - f.bottom, "axis");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].size() > 4) {
            svg.text(f.x(i) + 4, f.height - f.bottom + 10, labels[i], "ytick", -45);
        } else {
            svg.text(f.x(i), f.height - f.bottom + 14, labels[i], "tick");
        }
    }
    svg.text(f.width / 2, f.height - 20, xlabel, "label");
    svg.text(18, f.top + f.plot_h() / 2, ylabel, "label", -90);
}

}  // namespace detail

/// One box per entry; entries without stats leave an empty slot.
inline std::string boxplot_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                               std::span<const Box> boxes) {
    detail::Frame f;
    f.slots = std::max<std::size_t>(1, boxes.size());
    f.width = std::max(480.0, 40.0 * static_cast<double>(f.slots) + f.left + f.right);
    f.height = 400;
    f.lo = INFINITY;
    f.hi = -INFINITY;
    for (const auto& b : boxes) {
        if (b.stats) {
            f.lo = std::min(f.lo, b.stats->min);
            f.hi = std::max(f.hi, b.stats->max);
        }
    }
    if (!std::isfinite(f.lo)) {
        f.lo = 0;
        f.hi = 1;
    }
    detail::nice_range(f.lo, f.hi);

    Svg svg(f.width, f.height);
    std::vector<std::string> labels;
    for (const auto& b : boxes) {
        labels.push_back(b.label);
    }
    detail::axes(svg, f, title, xlabel, ylabel, labels);
    const double half = 0.3 * f.slot_w();
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (!boxes[i].stats) {
            continue;
        }
        const auto& q = *boxes[i].stats;
        const double cx = f.x(i);
        svg.line(cx, f.y(q.max), cx, f.y(q.q3), "whisker");
        svg.line(cx, f.y(q.q1), cx, f.y(q.min), "whisker");
        svg.line(cx - half / 2, f.y(q.max), cx + half / 2, f.y(q.max), "whisker");
        svg.line(cx - half / 2, f.y(q.min), cx + half / 2, f.y(q.min), "whisker");
        svg.rect(cx - half, f.y(q.q3), 2 * half, std::max(0.5, f.y(q.q1) - f.y(q.q3)), "box");
        svg.line(cx - half, f.y(q.median), cx + half, f.y(q.median), "median");
    }
    return svg.str();
}

/// Lines over a shared categorical x axis; missing values break the line.
inline std::string line_plot_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                                 const std::vector<std::string>& labels, std::span<const Series> series,
                                 std::optional<std::pair<double, double>> y_range = std::nullopt) {
    detail::Frame f;
    f.slots = std::max<std::size_t>(1, labels.size());
    f.width = std::max(480.0, 32.0 * static_cast<double>(f.slots) + f.left + f.right);
    f.height = 400;
    if (y_range) {
        f.lo = y_range->first;
        f.hi = y_range->second;
    } else {
        f.lo = INFINITY;
        f.hi = -INFINITY;
        for (const auto& s : series) {
            for (const auto& v : s.values) {
                if (v) {
                    f.lo = std::min(f.lo, *v);
                    f.hi = std::max(f.hi, *v);
                }
            }
        }
        if (!std::isfinite(f.lo)) {
            f.lo = 0;
            f.hi = 1;
        }
        detail::nice_range(f.lo, f.hi);
    }
    Svg svg(f.width, f.height);
    detail::axes(svg, f, title, xlabel, ylabel, labels);
    for (std::size_t si = 0; si < series.size(); ++si) {
        const std::string idx = std::to_string(si % 3);
        std::vector<std::pair<double, double>> run;
        for (std::size_t i = 0; i <= series[si].values.size(); ++i) {
            const bool have = i < series[si].values.size() && series[si].values[i].has_value();
            if (have) {
                const double px = f.x(i);
                const double py = f.y(*series[si].values[i]);
                run.emplace_back(px, py);
                svg.circle(px, py, 2.5, "dot" + idx);
            } else {
                svg.polyline(run, "series" + idx);
                run.clear();
            }
        }
        const double ly = f.top + 14.0 * static_cast<double>(si);
        svg.line(f.width - f.right - 110, ly, f.width - f.right - 90, ly, "series" + idx);
        svg.text(f.width - f.right - 85, ly + 4, series[si].name, "legend");
    }
    return svg.str();
}

/// Tick labels for sweep cells: only the parameters that vary across the
/// grid are shown, joined by '/'.
inline std::vector<std::string> cell_labels(std::span<const AggregateRow> rows, std::string* axis_name = nullptr) {
    auto varies = [&](auto get) {
        return std::any_of(rows.begin(), rows.end(), [&](const AggregateRow& r) { return get(r) != get(rows.front()); });
    };
    const bool symmetric = std::all_of(rows.begin(), rows.end(), [](const AggregateRow& r) { return r.t1 == r.t2; });
    const bool vs = varies([](const AggregateRow& r) { return r.s; });
    const bool vt1 = varies([](const AggregateRow& r) { return r.t1; });
    const bool vt2 = varies([](const AggregateRow& r) { return r.t2; });
    std::string name;
    auto add_name = [&](const char* n) { name += (name.empty() ? "" : "/") + std::string(n); };
    if (vs) add_name("s");
    if (symmetric && (vt1 || vt2)) {
        add_name("t");
    } else {
        if (vt1) add_name("t1");
        if (vt2) add_name("t2");
    }
    if (name.empty()) {
        name = "cell";
    }
    std::vector<std::string> labels;
    for (const auto& r : rows) {
        std::string l;
        auto add = [&](double v) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%.2f", v);
            l += (l.empty() ? "" : "/") + std::string(buf);
        };
        if (vs) add(r.s);
        if (symmetric && (vt1 || vt2)) {
            add(r.t1);
        } else {
            if (vt1) add(r.t1);
            if (vt2) add(r.t2);
        }
        labels.push_back(l.empty() ? std::to_string(labels.size() + 1) : l);
    }
    if (axis_name != nullptr) {
        *axis_name = name;
    }
    return labels;
}

/// Writes the stabilisation boxplot, the similarity boxplot, the similarity
/// line plot (overall and per group), and the dimension line plot for one
/// sweep. Returns the files written.
inline std::vector<std::filesystem::path> emit_plots(std::span<const AggregateRow> rows, std::span<const RunRecord> raw,
                                                     const std::filesystem::path& out_dir, const std::string& name) {
    std::string axis;
    const auto labels = cell_labels(rows, &axis);

    std::vector<Box> stab_boxes;
    std::vector<Box> sim_boxes;
    Series overall{"similarity", {}};
    Series g1{"group 1", {}};
    Series g2{"group 2", {}};
    Series dim{"mean d_hat", {}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        stab_boxes.push_back({labels[i], r.stabilisation});
        std::vector<double> sims;
        for (const auto& rec : raw) {
            if (std::abs(rec.t1 - r.t1) < 1e-9 && std::abs(rec.t2 - r.t2) < 1e-9 && std::abs(rec.s - r.s) < 1e-9) {
                sims.push_back(rec.similarity_overall);
            }
        }
        sim_boxes.push_back({labels[i], sims.empty() ? std::nullopt : std::optional(five_number(sims))});
        overall.values.emplace_back(r.similarity);
        g1.values.emplace_back(r.similarity_g1);
        g2.values.emplace_back(r.similarity_g2);
        dim.values.emplace_back(r.d_hat_mean);
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::vector<std::filesystem::path> written;
    auto write = [&](const std::string& suffix, const std::string& content) {
        const auto path = out_dir / (name + suffix);
        std::ofstream out(path, std::ios::binary);
        out << content;
        if (!out) {
            throw std::runtime_error("cannot write " + path.string());
        }
        written.push_back(path);
    };
    write("_stabilisation.svg",
          boxplot_svg(name + ": steps until all agents are happy", axis, "steps", stab_boxes));
    write("_similarity_box.svg",
          boxplot_svg(name + ": same-group share of neighbours", axis, "similarity", sim_boxes));
    const std::vector<Series> sim_series{overall, g1, g2};
    write("_similarity.svg", line_plot_svg(name + ": mean similarity", axis, "similarity", labels, sim_series));
    const std::vector<Series> dim_series{dim};
    write("_dimension.svg", line_plot_svg(name + ": mean embedded dimension", axis, "d_hat", labels, dim_series,
                                          std::pair{0.5, 2.5}));
    return written;
}

}  // namespace schelling::plots
