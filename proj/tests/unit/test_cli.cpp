#include <fiber/cli/commands.hpp>
#include <fiber/cli/io.hpp>
#include <fiber/cli/render.hpp>

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

using namespace fiber;
using namespace fiber::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        std::random_device rd;
        path = fs::temp_directory_path() / ("fiber_cli_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string write_config(const TempDir& dir, const json& doc, const std::string& name = "config.json")
{
    const std::string p = dir / name;
    write_file(p, doc.dump(2));
    return p;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(FIBER_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines_of(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        out.push_back(line);
    return out;
}

// Balanced-tag check: every element closes in order, one root.
bool well_formed_xml(const std::string& s)
{
    std::vector<std::string> stack;
    int roots = 0;
    std::size_t i = 0;
    while ((i = s.find('<', i)) != std::string::npos) {
        const std::size_t j = s.find('>', i);
        if (j == std::string::npos)
            return false;
        const std::string tag = s.substr(i + 1, j - i - 1);
        i = j + 1;
        if (tag.empty())
            return false;
        if (tag[0] == '?' || tag[0] == '!')
            continue;
        if (tag[0] == '/') {
            if (stack.empty() || stack.back() != tag.substr(1))
                return false;
            stack.pop_back();
            continue;
        }
        if (stack.empty())
            ++roots;
        if (tag.back() == '/')
            continue;
        stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
    }
    return stack.empty() && roots == 1;
}

int count_of(const std::string& s, const std::string& needle)
{
    int n = 0;
    for (std::size_t i = s.find(needle); i != std::string::npos; i = s.find(needle, i + 1))
        ++n;
    return n;
}

} // namespace

TEST_CASE("config defaults and echo")
{
    const RunConfig cfg = parse_config(json::object());
    CHECK(cfg.scenario.params.omega == 1e-5);
    CHECK(cfg.scenario.params.bend == 1e-9);
    CHECK(cfg.scenario.node_count == 300);
    CHECK(cfg.scenario.config.tol_a == 1e-3);
    CHECK(cfg.scenario.config.tol_r == 1e-2);
    const json echo = to_json(cfg);
    CHECK(to_json(parse_config(echo)) == echo);
}

TEST_CASE("config errors name the key")
{
    auto message = [](const json& doc) {
        try {
            parse_config(doc);
        } catch (const Error& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message(json{{"model", {{"omegga", 1.0}}}}).find("model.omegga") != std::string::npos);
    CHECK(message(json{{"grid", {{"M", "many"}}}}).find("grid.M") != std::string::npos);
    CHECK(message(json{{"force", {{"kind", "wind"}}}}).find("force.kind") != std::string::npos);
    CHECK(message(json{{"constraints", {{"density", "quarter"}}}}).find("constraints.density") !=
          std::string::npos);
    CHECK(message(json{{"bogus", 1}}).find("bogus") != std::string::npos);
}

TEST_CASE("shortest round-trip decimals")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(parse_double(format_double(x)) == x);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-3) == "0.001");
}

TEST_CASE("trajectory files round-trip byte-exact")
{
    RunConfig cfg = parse_config(json{{"grid", {{"M", 12}}}, {"time", {{"tau", 2.5e-4}}}, {"force", {{"kind", "caseB"}}}});
    const Trajectory traj = run(cfg.scenario);
    std::ostringstream first;
    write_trajectory(first, make_trajectory_file(cfg, traj));
    std::istringstream in(first.str());
    const TrajectoryFile back = read_trajectory(in);
    std::ostringstream second;
    write_trajectory(second, back);
    CHECK(first.str() == second.str());
    REQUIRE(back.trajectory.states.size() == traj.states.size());
    for (std::size_t k = 0; k < traj.states.size(); ++k)
        CHECK(back.trajectory.states[k] == traj.states[k]);
    CHECK(lines_of(first.str()).size() == traj.states.size() + 2);
}

TEST_CASE("simulate matches the library run bit-exactly")
{
    TempDir dir;
    const json doc{{"time", {{"tau", 1e-4}}}, {"model", {{"T", 1e-3}}}, {"force", {{"kind", "caseA"}}}};
    REQUIRE(run_cli("simulate --config " + write_config(dir, doc) + " --out " + (dir / "out")) == 0);
    std::istringstream in(read_file(dir / "out/trajectory.csv"));
    const TrajectoryFile file = read_trajectory(in);
    const Trajectory lib = run(parse_config(doc).scenario);
    REQUIRE(file.trajectory.states.size() == lib.states.size());
    CHECK(file.trajectory.states.size() == 11);
    for (std::size_t k = 0; k < lib.states.size(); ++k)
        CHECK(file.trajectory.states[k] == lib.states[k]);
    CHECK(file.trajectory.elongations == lib.elongations);
}

TEST_CASE("zero force elongation is zero to rounding")
{
    TempDir dir;
    const json doc{{"grid", {{"M", 30}}}, {"time", {{"tau", 1e-4}}}, {"force", {{"kind", "zero"}}}};
    REQUIRE(run_cli("simulate --config " + write_config(dir, doc) + " --out " + (dir / "out")) == 0);
    const auto lines = lines_of(read_file(dir / "out/elongation.csv"));
    REQUIRE(lines.size() == 12);
    CHECK(lines[0] == "k,t,dl");
    for (std::size_t i = 1; i < lines.size(); ++i)
        CHECK(std::abs(parse_double(lines[i].substr(lines[i].rfind(',') + 1))) <= kElongationFloor);
}

TEST_CASE("exit codes")
{
    TempDir dir;
    CHECK(run_cli("simulate --config " + write_config(dir, json{{"model", {{"omegga", 1.0}}}}) + " --out " +
                  (dir / "out")) == 1);
    CHECK(run_cli("simulate --config " + (dir / "missing.json") + " --out " + (dir / "out")) == 2);
    CHECK(run_cli("render --traj " + (dir / "missing.csv") + " --out " + (dir / "x.svg") + " --times 0") == 2);
    CHECK(run_cli("simulate") == 1);

    std::ostringstream err;
    write_file(dir / "bad.json", "{ not json");
    CHECK(simulate(dir / "bad.json", dir / "out", false, err) == kExitFailure);
    CHECK_FALSE(err.str().empty());
}

TEST_CASE("convergence report has one row per time step")
{
    TempDir dir;
    const json doc{{"grid", {{"M", 12}}}, {"study", {{"cases", {"caseA"}}}}};
    const std::string cfg = write_config(dir, doc);
    REQUIRE(run_cli("study --kind convergence --config " + cfg + " --out " + (dir / "a")) == 0);
    const std::string report = read_file(dir / "a/convergence_caseA.csv");
    const auto lines = lines_of(report);
    REQUIRE(lines.size() == 9);
    CHECK(lines[0] == "tau,error_L2,error_max,error_nodal,dl,iters_total,iters_avg,wall_ms,failure");
    REQUIRE(run_cli("study --kind convergence --config " + cfg + " --out " + (dir / "b")) == 0);
    CHECK(read_file(dir / "b/convergence_caseA.csv") == report);
}

TEST_CASE("bound report columns")
{
    TempDir dir;
    const json doc{{"grid", {{"M", 12}}}, {"model", {{"T", 5e-4}}}, {"time", {{"tau", 1.25e-4}}}};
    REQUIRE(run_cli("study --kind bound --config " + write_config(dir, doc) + " --out " + (dir / "out")) == 0);
    const auto lines = lines_of(read_file(dir / "out/bound.csv"));
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "k,t,bound,dl_nodal,dl_half,dl_third");
    const auto summary = lines_of(read_file(dir / "out/bound_summary.csv"));
    CHECK(summary.size() == 4);
}

TEST_CASE("render")
{
    RunConfig cfg = parse_config(json{{"grid", {{"M", 10}}}, {"time", {{"tau", 2.5e-4}}}, {"force", {{"kind", "zero"}}}});
    const Trajectory traj = run(cfg.scenario);
    const std::string svg = render_svg(traj, {0.0, 5e-4, 1e-3});
    CHECK(well_formed_xml(svg));
    CHECK(count_of(svg, "<polyline class=\"fiber\"") == 3);
    CHECK(render_svg(traj, {2.5e-4}).find("<polyline class=\"fiber\"") != std::string::npos);
    CHECK(count_of(render_svg(traj, {2.5e-4}), "<polyline class=\"fiber\"") == 1);
    CHECK_THROWS(parse_time_list("0.1,abc"));
    CHECK(parse_time_list("0,1e-3") == std::vector<double>{0.0, 1e-3});

    // A straight fiber renders as a segment: all points share one horizontal coordinate.
    const std::size_t at = svg.find("points=\"");
    REQUIRE(at != std::string::npos);
    std::istringstream pts(svg.substr(at + 8, svg.find('"', at + 8) - at - 8));
    std::string pair;
    std::set<std::string> xs;
    while (pts >> pair)
        xs.insert(pair.substr(0, pair.find(',')));
    CHECK(xs.size() == 1);

    TempDir dir;
    std::ostringstream t;
    write_trajectory(t, make_trajectory_file(cfg, traj));
    write_file(dir / "traj.csv", t.str());
    REQUIRE(run_cli("render --traj " + (dir / "traj.csv") + " --out " + (dir / "f.svg") + " --times 0,1e-3") == 0);
    CHECK(count_of(read_file(dir / "f.svg"), "<polyline class=\"fiber\"") == 2);
}
