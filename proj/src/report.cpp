#include "igsm/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace igsm::rep {

namespace {

constexpr int kCell = 64;
constexpr int kMarginLeft = 90;
constexpr int kMarginTop = 50;
constexpr int kMarginBottom = 60;
constexpr int kPlotW = 520;
constexpr int kPlotH = 340;

std::string fmt(double v, int digits = 2) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

// Diverging blue-white-red ramp centered at zero gain.
std::string gain_color(double gain, double scale) {
    double t = scale > 0 ? std::clamp(gain / scale, -1.0, 1.0) : 0.0;
    int r, g, b;
    if (t >= 0) {
        r = 255;
        g = static_cast<int>(255 - 160 * t);
        b = static_cast<int>(255 - 200 * t);
    } else {
        r = static_cast<int>(255 + 200 * t);
        g = static_cast<int>(255 + 160 * t);
        b = 255;
    }
    std::ostringstream s;
    s << "rgb(" << r << ',' << g << ',' << b << ')';
    return s.str();
}

void svg_open(std::ostringstream& s, int w, int h, const std::string& title) {
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    s << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << title << "</text>\n";
}

const char* kLineColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                             "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

std::string line_plot(const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series) {
    double xmin = 1e300, xmax = -1e300, ymin = 0, ymax = 0;
    bool any = false;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
            any = true;
        }
    if (!any) throw MalformedInput("line plot: no data points");
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double ypad = 0.08 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;
    const int w = kMarginLeft + kPlotW + 160, h = kMarginTop + kPlotH + kMarginBottom;
    auto px = [&](double x) {
        return kMarginLeft + (x - xmin) / (xmax - xmin) * kPlotW;
    };
    auto py = [&](double y) {
        return kMarginTop + (1.0 - (y - ymin) / (ymax - ymin)) * kPlotH;
    };
    std::ostringstream s;
    svg_open(s, w, h, title);
    s << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << kPlotW
      << "\" height=\"" << kPlotH << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (ymin < 0 && ymax > 0)
        s << "<line x1=\"" << kMarginLeft << "\" y1=\"" << fmt(py(0)) << "\" x2=\""
          << kMarginLeft + kPlotW << "\" y2=\"" << fmt(py(0))
          << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
    for (size_t i = 0; i < series.size(); ++i) {
        const char* color = kLineColors[i % 8];
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (auto [x, y] : series[i].points) s << fmt(px(x)) << ',' << fmt(py(y)) << ' ';
        s << "\"/>\n";
        for (auto [x, y] : series[i].points)
            s << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y))
              << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        s << "<text x=\"" << kMarginLeft + kPlotW + 12 << "\" y=\""
          << kMarginTop + 16 + 18 * static_cast<int>(i) << "\" fill=\"" << color << "\">"
          << series[i].label << "</text>\n";
    }
    // axis extremes
    s << "<text x=\"" << kMarginLeft << "\" y=\"" << kMarginTop + kPlotH + 18
      << "\" text-anchor=\"middle\">" << fmt(xmin, 0) << "</text>\n";
    s << "<text x=\"" << kMarginLeft + kPlotW << "\" y=\"" << kMarginTop + kPlotH + 18
      << "\" text-anchor=\"middle\">" << fmt(xmax, 0) << "</text>\n";
    s << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << fmt(py(ymin))
      << "\" text-anchor=\"end\">" << fmt(ymin) << "</text>\n";
    s << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << fmt(py(ymax))
      << "\" text-anchor=\"end\">" << fmt(ymax) << "</text>\n";
    s << "<text x=\"" << kMarginLeft + kPlotW / 2 << "\" y=\"" << h - 16
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    s << "<text x=\"18\" y=\"" << kMarginTop + kPlotH / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << kMarginTop + kPlotH / 2 << ")\">" << y_label << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

void require_axes(const nn::GainGrid& grid) {
    if (grid.sizes.empty() || grid.difficulties.empty())
        throw MalformedInput("grid: empty axes");
}

}  // namespace

std::string heatmap_csv(const nn::GainGrid& grid) {
    require_axes(grid);
    std::ostringstream out;
    out << "size,difficulty,mean_gain,n_seeds,missing\n";
    out.precision(17);
    for (int size : grid.sizes)
        for (int difficulty : grid.difficulties) {
            int n = 0;
            for (const auto& c : grid.cells)
                if (c.size == size && c.difficulty == difficulty && !c.failed) ++n;
            auto g = grid.mean_gain(size, difficulty);
            out << size << ',' << difficulty << ',';
            if (g)
                out << *g << ',' << n << ",0\n";
            else
                out << ',' << n << ",1\n";
        }
    return out.str();
}

std::string heatmap_svg(const nn::GainGrid& grid) {
    require_axes(grid);
    double scale = 0;
    for (int size : grid.sizes)
        for (int difficulty : grid.difficulties)
            if (auto g = grid.mean_gain(size, difficulty)) scale = std::max(scale, std::abs(*g));
    const int cols = static_cast<int>(grid.difficulties.size());
    const int rows = static_cast<int>(grid.sizes.size());
    const int w = kMarginLeft + cols * kCell + 40;
    const int h = kMarginTop + rows * kCell + kMarginBottom;
    std::ostringstream s;
    svg_open(s, w, h, "Mean gain (pp) by data size and difficulty — base " + grid.base_tag);
    for (int r = 0; r < rows; ++r) {
        const int size = grid.sizes[static_cast<size_t>(rows - 1 - r)];  // large on top
        const int y = kMarginTop + r * kCell;
        s << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << y + kCell / 2 + 4
          << "\" text-anchor=\"end\">" << size << "</text>\n";
        for (int c = 0; c < cols; ++c) {
            const int difficulty = grid.difficulties[static_cast<size_t>(c)];
            const int x = kMarginLeft + c * kCell;
            auto g = grid.mean_gain(size, difficulty);
            if (g) {
                s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell
                  << "\" height=\"" << kCell << "\" fill=\"" << gain_color(*g, scale)
                  << "\" stroke=\"#888\"/>\n";
                s << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 4
                  << "\" text-anchor=\"middle\">" << fmt(*g) << "</text>\n";
            } else {
                s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell
                  << "\" height=\"" << kCell << "\" fill=\"#dddddd\" stroke=\"#888\"/>\n";
                s << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 4
                  << "\" text-anchor=\"middle\">missing</text>\n";
            }
        }
    }
    for (int c = 0; c < cols; ++c)
        s << "<text x=\"" << kMarginLeft + c * kCell + kCell / 2 << "\" y=\""
          << kMarginTop + rows * kCell + 20 << "\" text-anchor=\"middle\">op "
          << grid.difficulties[static_cast<size_t>(c)] << "</text>\n";
    s << "<text x=\"" << kMarginLeft + cols * kCell / 2 << "\" y=\"" << h - 14
      << "\" text-anchor=\"middle\">training difficulty (ops)</text>\n";
    s << "<text x=\"18\" y=\"" << kMarginTop + rows * kCell / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << kMarginTop + rows * kCell / 2 << ")\">training set size</text>\n";
    s << "</svg>\n";
    return s.str();
}

std::string slices_csv(const nn::GainGrid& grid) {
    require_axes(grid);
    std::ostringstream out;
    out << "slice,fixed,x,mean_gain\n";
    out.precision(17);
    for (int size : grid.sizes)
        for (int difficulty : grid.difficulties)
            if (auto g = grid.mean_gain(size, difficulty))
                out << "by_size," << size << ',' << difficulty << ',' << *g << '\n';
    for (int difficulty : grid.difficulties)
        for (int size : grid.sizes)
            if (auto g = grid.mean_gain(size, difficulty))
                out << "by_difficulty," << difficulty << ',' << size << ',' << *g << '\n';
    return out.str();
}

std::string slice_by_size_svg(const nn::GainGrid& grid) {
    require_axes(grid);
    std::vector<Series> series;
    for (int size : grid.sizes) {
        Series s;
        s.label = "size " + std::to_string(size);
        for (int difficulty : grid.difficulties)
            if (auto g = grid.mean_gain(size, difficulty))
                s.points.push_back({static_cast<double>(difficulty), *g});
        if (!s.points.empty()) series.push_back(std::move(s));
    }
    return line_plot("Gain vs difficulty at fixed size", "training difficulty (ops)",
                     "mean gain (pp)", series);
}

std::string slice_by_difficulty_svg(const nn::GainGrid& grid) {
    require_axes(grid);
    std::vector<Series> series;
    for (int difficulty : grid.difficulties) {
        Series s;
        s.label = "op " + std::to_string(difficulty);
        for (int size : grid.sizes)
            if (auto g = grid.mean_gain(size, difficulty))
                s.points.push_back({static_cast<double>(size), *g});
        if (!s.points.empty()) series.push_back(std::move(s));
    }
    return line_plot("Gain vs size at fixed difficulty", "training set size",
                     "mean gain (pp)", series);
}

std::string optimal_csv(const nn::GainGrid& grid) {
    require_axes(grid);
    auto opt = nn::optimal_difficulty(grid);
    std::ostringstream out;
    out << "size,optimal_difficulty\n";
    for (const auto& [size, difficulty] : opt) out << size << ',' << difficulty << '\n';
    return out.str();
}

std::string optimal_svg(const nn::GainGrid& grid) {
    require_axes(grid);
    auto opt = nn::optimal_difficulty(grid);
    if (opt.empty()) throw MalformedInput("optimal: no completed rows");
    Series s;
    s.label = "optimal difficulty";
    for (const auto& [size, difficulty] : opt)
        s.points.push_back({static_cast<double>(size), static_cast<double>(difficulty)});
    return line_plot("Optimal difficulty vs size", "training set size",
                     "optimal difficulty (ops)", {s});
}

std::string curves_svg(const nn::DecomposedCurves& curves) {
    std::vector<Series> series;
    for (const auto& [label, curve] : curves.curves) {
        Series s;
        s.label = label;
        for (const auto& [op, acc] : curve)
            s.points.push_back({static_cast<double>(op), acc});
        if (!s.points.empty()) series.push_back(std::move(s));
    }
    if (series.empty()) throw MalformedInput("curves: no data");
    return line_plot("Accuracy by test difficulty", "test difficulty (ops)", "accuracy",
                     series);
}

}  // namespace igsm::rep
