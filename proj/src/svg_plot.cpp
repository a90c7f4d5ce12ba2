#include "tising/svg_plot.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace tising {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 420;
constexpr int kLeft = 70, kRight = 130, kTop = 30, kBottom = 60;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
                                   "#7f7f7f"};

std::string fixed2(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << v;
    return os.str();
}

} // namespace

std::string render_sweep_svg(const std::vector<SweepRow>& rows, PlotMetric metric) {
    // p -> α -> (sum, count) over successful trials.
    std::map<int, std::map<double, std::pair<double, int>>> series;
    for (const auto& r : rows) {
        if (r.status != "ok") continue;
        double v = 0.0;
        if (metric == PlotMetric::recovery_rate) {
            if (!r.recovery_rate) continue;
            v = *r.recovery_rate;
        } else {
            if (!r.success) continue;
            v = *r.success ? 1.0 : 0.0;
        }
        auto& cell = series[r.point.p][r.point.alpha];
        cell.first += v;
        ++cell.second;
    }

    const int pw = kWidth - kLeft - kRight;
    const int ph = kHeight - kTop - kBottom;
    const char* ylabel = metric == PlotMetric::recovery_rate ? "mean recovery rate" : "success fraction";

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    os << "<g stroke=\"black\" stroke-width=\"1\">\n";
    os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\"" << kTop + ph
       << "\"/>\n";
    os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + ph << "\"/>\n";
    os << "</g>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
    os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">scaling parameter "
       << "α</text>\n";
    os << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << kTop + ph / 2 << ")\">" << ylabel << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double y = kTop + ph - ph * i / 4.0;
        os << "<text x=\"" << kLeft - 8 << "\" y=\"" << fixed2(y + 4) << "\" text-anchor=\"end\">" << fixed2(i / 4.0)
           << "</text>\n";
    }

    if (series.empty()) {
        os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kTop + ph / 2
           << "\" text-anchor=\"middle\">no data</text>\n</g>\n</svg>\n";
        return os.str();
    }

    double xmin = series.begin()->second.begin()->first, xmax = xmin;
    for (const auto& [p, pts] : series) {
        xmin = std::min(xmin, pts.begin()->first);
        xmax = std::max(xmax, pts.rbegin()->first);
    }
    if (xmax == xmin) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    auto sx = [&](double a) { return kLeft + pw * (a - xmin) / (xmax - xmin); };
    auto sy = [&](double v) { return kTop + ph - ph * v; };
    for (int i = 0; i <= 4; ++i) {
        const double a = xmin + (xmax - xmin) * i / 4.0;
        os << "<text x=\"" << fixed2(sx(a)) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
           << fixed2(a) << "</text>\n";
    }
    os << "</g>\n";

    int idx = 0;
    for (const auto& [p, pts] : series) {
        const char* color = kColors[idx % std::size(kColors)];
        os << "<polyline data-p=\"" << p << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        bool first = true;
        for (const auto& [a, cell] : pts) {
            os << (first ? "" : " ") << fixed2(sx(a)) << ',' << fixed2(sy(cell.first / cell.second));
            first = false;
        }
        os << "\"/>\n";
        for (const auto& [a, cell] : pts)
            os << "<circle cx=\"" << fixed2(sx(a)) << "\" cy=\"" << fixed2(sy(cell.first / cell.second))
               << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        const int ly = kTop + 10 + 20 * idx;
        os << "<line x1=\"" << kWidth - kRight + 15 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight + 40
           << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << kWidth - kRight + 46 << "\" y=\"" << ly + 4
           << "\" font-family=\"sans-serif\" font-size=\"12\">p = " << p << "</text>\n";
        ++idx;
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace tising
