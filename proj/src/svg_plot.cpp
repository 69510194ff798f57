#include "platoon/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "platoon/csv_io.hpp"
#include "platoon/errors.hpp"

namespace platoon {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 540.0;
constexpr double kMarginLeft = 72.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 48.0;
constexpr double kMarginBottom = 58.0;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Series {
    std::string label;
    std::vector<double> values;  // indexed by step k
};

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

Range value_range(const std::vector<Series>& series, std::optional<double> extra_lo,
                  std::optional<double> extra_hi) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& s : series) {
        for (double v : s.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (extra_lo) lo = std::min(lo, *extra_lo);
    if (extra_hi) hi = std::max(hi, *extra_hi);
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    return Range{lo - pad, hi + pad};
}

std::vector<double> nice_ticks(double lo, double hi, int target) {
    const double span = hi - lo;
    double step = std::pow(10.0, std::floor(std::log10(span / std::max(target, 2))));
    for (double mult : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
        if (span / (step * mult) <= target) {
            step *= mult;
            break;
        }
    }
    std::vector<double> ticks;
    double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 1e-9 * span; v += step) {
        ticks.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
    }
    return ticks;
}

class LineChart {
public:
    LineChart(std::string title, std::string y_label, int horizon)
        : title_(std::move(title)), y_label_(std::move(y_label)), horizon_(std::max(horizon, 1)) {}

    void add_series(std::string label, std::vector<double> values) {
        series_.push_back(Series{std::move(label), std::move(values)});
    }

    void shade_window(int from, int to) { window_ = std::make_pair(from, to); }
    void add_guide(double y, std::string label) { guides_.emplace_back(y, std::move(label)); }

    void render(const std::filesystem::path& path) const {
        const Range yr = y_range();
        std::ostringstream svg;
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
            << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
        svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
            << "\" fill=\"white\"/>\n";
        svg << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"18\">" << title_ << "</text>\n";

        if (window_) {
            const double x0 = x_pos(window_->first);
            const double x1 = x_pos(window_->second);
            svg << "<rect x=\"" << fmt(x0) << "\" y=\"" << kMarginTop << "\" width=\""
                << fmt(std::max(x1 - x0, 1.0)) << "\" height=\"" << plot_height()
                << "\" fill=\"#d62728\" fill-opacity=\"0.10\"/>\n";
            svg << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << kMarginTop + 14
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
                << "fill=\"#d62728\">attack window</text>\n";
        }

        draw_axes(svg, yr);
        for (const auto& [y, label] : guides_) {
            if (y < yr.lo || y > yr.hi) continue;
            const double py = y_pos(y, yr);
            svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << fmt(py) << "\" x2=\""
                << kWidth - kMarginRight << "\" y2=\"" << fmt(py)
                << "\" stroke=\"#555555\" stroke-dasharray=\"6,4\" stroke-width=\"1\"/>\n";
            svg << "<text x=\"" << kWidth - kMarginRight + 6 << "\" y=\"" << fmt(py + 4)
                << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555555\">" << label
                << "</text>\n";
        }

        for (std::size_t s = 0; s < series_.size(); ++s) {
            const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
            for (std::size_t k = 0; k < series_[s].values.size(); ++k) {
                if (k > 0) svg << " ";
                svg << fmt(x_pos(static_cast<int>(k))) << "," << fmt(y_pos(series_[s].values[k], yr));
            }
            svg << "\"/>\n";
        }

        // legend
        const double lx = kWidth - kMarginRight + 14;
        double ly = kMarginTop + 10;
        for (std::size_t s = 0; s < series_.size(); ++s) {
            const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
            svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 22 << "\" y2=\"" << ly
                << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
            svg << "<text x=\"" << lx + 28 << "\" y=\"" << ly + 4
                << "\" font-family=\"sans-serif\" font-size=\"12\">" << series_[s].label << "</text>\n";
            ly += 18;
        }

        svg << "</svg>\n";
        atomic_write_text(path, svg.str());
    }

private:
    double plot_width() const { return kWidth - kMarginLeft - kMarginRight; }
    double plot_height() const { return kHeight - kMarginTop - kMarginBottom; }

    double x_pos(int k) const {
        return kMarginLeft + plot_width() * static_cast<double>(k) / static_cast<double>(horizon_);
    }

    double y_pos(double v, const Range& yr) const {
        return kMarginTop + plot_height() * (yr.hi - v) / (yr.hi - yr.lo);
    }

    Range y_range() const {
        std::optional<double> lo, hi;
        for (const auto& [y, label] : guides_) {
            lo = lo ? std::min(*lo, y) : y;
            hi = hi ? std::max(*hi, y) : y;
        }
        return value_range(series_, lo, hi);
    }

    void draw_axes(std::ostringstream& svg, const Range& yr) const {
        const double x0 = kMarginLeft;
        const double x1 = kWidth - kMarginRight;
        const double y0 = kMarginTop + plot_height();
        const double y1 = kMarginTop;
        svg << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
            << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        svg << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
            << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

        for (double tick : nice_ticks(0.0, static_cast<double>(horizon_), 8)) {
            const double px = x_pos(static_cast<int>(tick));
            svg << "<line x1=\"" << fmt(px) << "\" y1=\"" << y0 << "\" x2=\"" << fmt(px) << "\" y2=\""
                << y0 + 5 << "\" stroke=\"black\"/>\n";
            svg << "<text x=\"" << fmt(px) << "\" y=\"" << y0 + 20
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
                << fmt(tick) << "</text>\n";
        }
        for (double tick : nice_ticks(yr.lo, yr.hi, 7)) {
            const double py = y_pos(tick, yr);
            svg << "<line x1=\"" << x0 - 5 << "\" y1=\"" << fmt(py) << "\" x2=\"" << x0 << "\" y2=\""
                << fmt(py) << "\" stroke=\"black\"/>\n";
            svg << "<text x=\"" << x0 - 9 << "\" y=\"" << fmt(py + 4)
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(tick)
                << "</text>\n";
            svg << "<line x1=\"" << x0 << "\" y1=\"" << fmt(py) << "\" x2=\"" << x1 << "\" y2=\""
                << fmt(py) << "\" stroke=\"#dddddd\" stroke-width=\"0.6\"/>\n";
        }

        svg << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 16
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">time step k</text>\n";
        svg << "<text x=\"20\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 20 "
            << (y0 + y1) / 2 << ")\">" << y_label_ << "</text>\n";
    }

    std::string title_;
    std::string y_label_;
    int horizon_;
    std::vector<Series> series_;
    std::optional<std::pair<int, int>> window_;
    std::vector<std::pair<double, std::string>> guides_;
};

std::vector<double> component_series(const SimulationTrace& trace, int vehicle,
                                     double StepRecord::* field) {
    std::vector<double> values;
    values.reserve(trace.records.size());
    for (const auto& row : trace.records) values.push_back(row[static_cast<std::size_t>(vehicle)].*field);
    return values;
}

}  // namespace

void emit_plots(const SimulationTrace& trace, const std::filesystem::path& out_dir,
                const PlotAnnotations& notes) {
    if (trace.records.empty()) throw std::invalid_argument("emit_plots: empty trace");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!std::filesystem::is_directory(out_dir)) {
        throw IoError("emit_plots: cannot create output directory " + out_dir.string());
    }

    const int n = trace.follower_count;
    const int horizon = static_cast<int>(trace.records.size()) - 1;

    LineChart velocity("Vehicle velocities", "velocity [m/s]", horizon);
    LineChart position("Vehicle positions", "position [m]", horizon);
    LineChart gaps("Inter-vehicle gaps", "gap [m]", horizon);
    if (notes.attack_window) {
        velocity.shade_window(notes.attack_window->first, notes.attack_window->second);
        position.shade_window(notes.attack_window->first, notes.attack_window->second);
        gaps.shade_window(notes.attack_window->first, notes.attack_window->second);
    }
    if (notes.d_min) gaps.add_guide(*notes.d_min, "d_min");
    if (notes.d_max) gaps.add_guide(*notes.d_max, "d_max");

    for (int i = 0; i <= n; ++i) {
        std::vector<double> v, s;
        v.reserve(trace.records.size());
        s.reserve(trace.records.size());
        for (const auto& row : trace.records) {
            v.push_back(row[static_cast<std::size_t>(i)].state.v);
            s.push_back(row[static_cast<std::size_t>(i)].state.s);
        }
        velocity.add_series("vehicle " + std::to_string(i), std::move(v));
        position.add_series("vehicle " + std::to_string(i), std::move(s));
    }
    for (int i = 1; i <= n; ++i) {
        gaps.add_series("gap e_" + std::to_string(i), component_series(trace, i, &StepRecord::gap));
    }

    velocity.render(out_dir / "velocity.svg");
    position.render(out_dir / "position.svg");
    gaps.render(out_dir / "gaps.svg");
}

}  // namespace platoon
