#include <fiber/cli/io.hpp>
#include <fiber/cli/render.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fiber::cli {

std::vector<double> parse_time_list(const std::string& text)
{
    std::vector<double> out;
    std::string cell;
    std::istringstream is(text);
    while (std::getline(is, cell, ','))
        if (!cell.empty())
            out.push_back(parse_double(cell));
    if (out.empty())
        throw InvalidConfiguration("empty time list");
    return out;
}

namespace {

constexpr double kWidth = 640.0, kHeight = 480.0, kMargin = 60.0, kLegend = 130.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double x)
{
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

} // namespace

std::string render_svg(const Trajectory& traj, const std::vector<double>& times)
{
    if (traj.params.dim < 2)
        throw InvalidConfiguration("render needs dim >= 2");
    std::vector<CoefficientTuple> shots;
    for (double t : times)
        shots.push_back(interpolant_at(traj, t));

    // Horizontal: component 2 (index 1); vertical: component 1 (index 0).
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& v : shots)
        for (int j = 0; j < v.node_count(); ++j) {
            xmin = std::min(xmin, v.value(j)(1));
            xmax = std::max(xmax, v.value(j)(1));
            ymin = std::min(ymin, v.value(j)(0));
            ymax = std::max(ymax, v.value(j)(0));
        }
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
    const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    const double plot = std::min(kWidth - kLegend - 2 * kMargin, kHeight - 2 * kMargin);
    const double scale = plot / span;
    const double ox = kMargin + 0.5 * plot, oy = kMargin + 0.5 * plot;
    auto px = [&](double x) { return ox + (x - cx) * scale; };
    auto py = [&](double y) { return oy - (y - cy) * scale; };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const double x0 = kMargin, x1 = kMargin + plot, y0 = kMargin, y1 = kMargin + plot;
    os << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
       << "<line x1=\"" << x0 << "\" y1=\"" << y1 << "\" x2=\"" << x1 << "\" y2=\"" << y1 << "\"/>\n"
       << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\"/>\n"
       << "</g>\n";
    const double lo_x = cx - 0.5 * span, hi_x = cx + 0.5 * span;
    const double lo_y = cy - 0.5 * span, hi_y = cy + 0.5 * span;
    os << "<g font-family=\"sans-serif\" font-size=\"11\">\n"
       << "<text x=\"" << x0 << "\" y=\"" << y1 + 16 << "\">" << num(lo_x) << "</text>\n"
       << "<text x=\"" << x1 << "\" y=\"" << y1 + 16 << "\" text-anchor=\"end\">" << num(hi_x) << "</text>\n"
       << "<text x=\"" << x0 - 4 << "\" y=\"" << y1 << "\" text-anchor=\"end\">" << num(lo_y) << "</text>\n"
       << "<text x=\"" << x0 - 4 << "\" y=\"" << y0 + 10 << "\" text-anchor=\"end\">" << num(hi_y) << "</text>\n"
       << "<text x=\"" << 0.5 * (x0 + x1) << "\" y=\"" << y1 + 32 << "\" text-anchor=\"middle\">r_2</text>\n"
       << "<text x=\"" << x0 - 40 << "\" y=\"" << 0.5 * (y0 + y1) << "\">r_1</text>\n"
       << "</g>\n";

    for (std::size_t i = 0; i < shots.size(); ++i) {
        const auto& v = shots[i];
        const char* color = kColors[i % std::size(kColors)];
        os << "<polyline class=\"fiber\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (int j = 0; j < v.node_count(); ++j)
            os << (j ? " " : "") << num(px(v.value(j)(1))) << ',' << num(py(v.value(j)(0)));
        os << "\"/>\n";
        const double ly = kMargin + 16.0 * static_cast<double>(i);
        const double lx = kWidth - kLegend;
        os << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 20 << "\" y2=\"" << ly << "\" stroke=\""
           << color << "\" stroke-width=\"2\"/>\n"
           << "<text x=\"" << lx + 26 << "\" y=\"" << ly + 4
           << "\" font-family=\"sans-serif\" font-size=\"11\">t = " << num(times[i]) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace fiber::cli
