#include <fiber/cli/io.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fiber::cli {

using nlohmann::json;

std::string format_double(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text)
{
    double x = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw IoError("not a number: '" + text + "'");
    return x;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad())
        throw IoError("error reading '" + path + "'");
    return os.str();
}

void write_file(const std::string& path, const std::string& contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << contents;
    out.flush();
    if (!out)
        throw IoError("error writing '" + path + "'");
}

TrajectoryFile make_trajectory_file(const RunConfig& config, const Trajectory& traj)
{
    TrajectoryFile f;
    f.header = {{"format", "fiber-trajectory"},
                {"version", 1},
                {"config", to_json(config)},
                {"grid", {{"l", traj.grid.length()}, {"M", traj.grid.node_count()}}},
                {"dim", traj.params.dim},
                {"tau", traj.tau},
                {"density", to_string(traj.density)},
                {"levels", traj.levels()}};
    f.trajectory = traj;
    return f;
}

void write_trajectory(std::ostream& out, const TrajectoryFile& file)
{
    const Trajectory& traj = file.trajectory;
    out << "# " << file.header.dump() << '\n';
    out << "k,t,dl,iterations";
    const Eigen::Index width = traj.states.empty() ? 0 : traj.states.front().size();
    for (Eigen::Index c = 0; c < width; ++c)
        out << ",c" << c;
    out << '\n';
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const int iters = k == 0 ? 0 : traj.stats[k - 1].iterations;
        out << k << ',' << format_double(traj.times[k]) << ',' << format_double(traj.elongations[k]) << ','
            << iters;
        const Vector& v = traj.states[k].coeffs();
        for (Eigen::Index c = 0; c < v.size(); ++c)
            out << ',' << format_double(v(c));
        out << '\n';
    }
}

namespace {

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, sep))
        out.push_back(cell);
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

int parse_int(const std::string& text)
{
    int x = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw IoError("not an integer: '" + text + "'");
    return x;
}

} // namespace

TrajectoryFile read_trajectory(std::istream& in)
{
    TrajectoryFile f;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
        throw IoError("trajectory file: missing '# ' header line");
    try {
        f.header = json::parse(line.substr(2));
    } catch (const json::parse_error& e) {
        throw IoError(std::string("trajectory file: bad header: ") + e.what());
    }
    if (f.header.value("format", "") != "fiber-trajectory")
        throw IoError("trajectory file: unknown format");
    RunConfig cfg;
    int m = 0, dim = 0;
    try {
        cfg = parse_config(f.header.at("config"));
        m = f.header.at("grid").at("M").get<int>();
        dim = f.header.at("dim").get<int>();
        f.trajectory.tau = f.header.at("tau").get<double>();
        f.trajectory.density = parse_density(f.header.at("density").get<std::string>());
        f.trajectory.grid = Grid(f.header.at("grid").at("l").get<double>(), m);
    } catch (const json::exception& e) {
        throw IoError(std::string("trajectory file: bad header: ") + e.what());
    } catch (const Error& e) {
        throw IoError(std::string("trajectory file: bad header: ") + e.what());
    }
    Trajectory& traj = f.trajectory;
    traj.params = cfg.scenario.params;

    const Eigen::Index width = static_cast<Eigen::Index>(2) * m * dim;
    if (!std::getline(in, line))
        throw IoError("trajectory file: missing column header");
    if (static_cast<Eigen::Index>(split(line, ',').size()) != 4 + width)
        throw IoError("trajectory file: column count does not match the grid");
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto cells = split(line, ',');
        if (static_cast<Eigen::Index>(cells.size()) != 4 + width)
            throw IoError("trajectory file: row " + std::to_string(row) + " has wrong length");
        if (parse_int(cells[0]) != static_cast<int>(row))
            throw IoError("trajectory file: rows out of order");
        traj.times.push_back(parse_double(cells[1]));
        traj.elongations.push_back(parse_double(cells[2]));
        const int iters = parse_int(cells[3]);
        if (row > 0) {
            SolveStats s;
            s.iterations = iters;
            traj.stats.push_back(s);
            traj.wall_ms.push_back(0.0);
        }
        Vector v(width);
        for (Eigen::Index c = 0; c < width; ++c)
            v(c) = parse_double(cells[static_cast<std::size_t>(4 + c)]);
        traj.states.emplace_back(m, dim, std::move(v));
        ++row;
    }
    if (traj.states.empty())
        throw IoError("trajectory file: no states");
    return f;
}

void write_elongation_csv(std::ostream& out, const Trajectory& traj)
{
    out << "k,t,dl\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k)
        out << k << ',' << format_double(traj.times[k]) << ',' << format_double(traj.elongations[k]) << '\n';
}

void write_stats_csv(std::ostream& out, const Trajectory& traj, bool timing)
{
    out << "level,iterations,backtracks,initial_stationarity,final_stationarity,dropped_rows";
    if (timing)
        out << ",wall_ms";
    out << '\n';
    for (int k = 0; k < traj.levels(); ++k) {
        const SolveStats& s = traj.stats[k];
        out << k << ',' << s.iterations << ',' << s.backtracks << ',' << format_double(s.initial_stationarity) << ','
            << format_double(s.final_stationarity) << ',' << s.dropped_rows;
        if (timing)
            out << ',' << format_double(traj.wall_ms[k]);
        out << '\n';
    }
}

namespace {

// Failure messages go in the last column; keep them CSV safe.
std::string csv_text(std::string s)
{
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '"')
            c = ';';
    return s;
}

} // namespace

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report)
{
    out << "tau,error_L2,error_max,error_nodal,dl,iters_total,iters_avg,wall_ms,failure\n";
    for (const auto& r : report.rows)
        out << format_double(r.tau) << ',' << format_double(r.error_l2) << ',' << format_double(r.error_max) << ','
            << format_double(r.error_nodal) << ',' << format_double(r.dl) << ',' << r.iters_total << ','
            << format_double(r.iters_avg) << ',' << format_double(r.wall_ms) << ',' << csv_text(r.failure) << '\n';
}

void write_elongation_report_csv(std::ostream& out, const ElongationReport& report)
{
    out << "tau";
    for (auto d : report.densities)
        out << ",dl_" << to_string(d);
    out << ",failure\n";
    for (std::size_t i = 0; i < report.taus.size(); ++i) {
        out << format_double(report.taus[i]);
        std::string failure;
        for (std::size_t d = 0; d < report.densities.size(); ++d) {
            out << ',' << format_double(report.dl[d][i]);
            if (!report.failure[d][i].empty())
                failure += to_string(report.densities[d]) + ": " + report.failure[d][i] + " ";
        }
        out << ',' << csv_text(failure) << '\n';
    }
}

void write_bound_csv(std::ostream& out, const BoundReport& report)
{
    out << "k,t,bound";
    const BoundRun* longest = nullptr;
    for (const auto& r : report.runs) {
        out << ",dl_" << to_string(r.density);
        if (!longest || r.series.samples.size() > longest->series.samples.size())
            longest = &r;
    }
    out << '\n';
    if (!longest)
        return;
    for (std::size_t k = 0; k < longest->series.samples.size(); ++k) {
        const BoundSample& ref = longest->series.samples[k];
        out << k << ',' << format_double(ref.t) << ',' << format_double(ref.bound);
        for (const auto& r : report.runs) {
            out << ',';
            if (k < r.series.samples.size())
                out << format_double(r.series.samples[k].dl);
        }
        out << '\n';
    }
}

void write_bound_summary_csv(std::ostream& out, const BoundReport& report)
{
    out << "density,satisfied,first_violation,levels,failure\n";
    for (const auto& r : report.runs)
        out << to_string(r.density) << ',' << (r.series.satisfied ? 1 : 0) << ',' << r.series.first_violation << ','
            << r.trajectory.levels() << ',' << csv_text(r.failure) << '\n';
}

} // namespace fiber::cli
