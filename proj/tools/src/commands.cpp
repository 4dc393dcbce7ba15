#include <fiber/cli/commands.hpp>
#include <fiber/cli/io.hpp>
#include <fiber/cli/render.hpp>

#include <filesystem>
#include <ostream>
#include <sstream>

namespace fiber::cli {

namespace fs = std::filesystem;

namespace {

void make_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create '" + dir + "': " + ec.message());
}

std::string path_in(const std::string& dir, const std::string& name)
{
    return (fs::path(dir) / name).string();
}

template <class Body>
int guarded(std::ostream& err, Body body)
{
    try {
        body();
        return kExitOk;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

ForceField study_case(const std::string& name)
{
    if (name == "caseA")
        return CaseAForce{};
    return CaseBForce{};
}

} // namespace

int simulate(const std::string& config_path, const std::string& out_dir, bool timing, std::ostream& err)
{
    return guarded(err, [&] {
        const RunConfig cfg = load_config(config_path);
        Trajectory traj;
        std::string failure;
        try {
            traj = run(cfg.scenario);
        } catch (const LevelFailure& e) {
            traj = e.partial();
            failure = e.what();
        }
        make_dir(out_dir);
        std::ostringstream t, e, s;
        write_trajectory(t, make_trajectory_file(cfg, traj));
        write_elongation_csv(e, traj);
        write_stats_csv(s, traj, timing);
        write_file(path_in(out_dir, "trajectory.csv"), t.str());
        write_file(path_in(out_dir, "elongation.csv"), e.str());
        write_file(path_in(out_dir, "stats.csv"), s.str());
        if (!failure.empty())
            throw Error(failure + " (partial trajectory written)");
    });
}

int study(const std::string& config_path, const std::string& kind, const std::string& out_dir, std::ostream& err)
{
    return guarded(err, [&] {
        const RunConfig cfg = load_config(config_path);
        std::vector<std::pair<std::string, std::string>> files;
        bool failed = false;
        if (kind == "convergence") {
            for (const auto& name : cfg.study.cases) {
                const auto report = run_convergence_study(study_case(name), cfg.study.density, study_options(cfg));
                failed |= !report.ok();
                std::ostringstream os;
                write_convergence_csv(os, report);
                files.emplace_back("convergence_" + name + ".csv", os.str());
            }
        } else if (kind == "elongation") {
            for (const auto& name : cfg.study.cases) {
                const auto report = run_elongation_study(study_case(name), cfg.study.densities, study_options(cfg));
                failed |= !report.ok();
                std::ostringstream os;
                write_elongation_report_csv(os, report);
                files.emplace_back("elongation_" + name + ".csv", os.str());
            }
        } else if (kind == "bound") {
            const auto report = run_bound_scenario(bound_options(cfg));
            std::ostringstream series, summary;
            write_bound_csv(series, report);
            write_bound_summary_csv(summary, report);
            for (const auto& r : report.runs)
                failed |= !r.failure.empty();
            files.emplace_back("bound.csv", series.str());
            files.emplace_back("bound_summary.csv", summary.str());
        } else {
            throw InvalidConfiguration("unknown study kind '" + kind + "'");
        }
        make_dir(out_dir);
        for (const auto& [name, text] : files)
            write_file(path_in(out_dir, name), text);
        if (failed)
            throw Error("some study runs failed; see the failure column");
    });
}

int render(const std::string& trajectory_path, const std::string& out_path, const std::string& times,
           std::ostream& err)
{
    return guarded(err, [&] {
        const std::vector<double> ts = parse_time_list(times);
        std::istringstream in(read_file(trajectory_path));
        const TrajectoryFile file = read_trajectory(in);
        write_file(out_path, render_svg(file.trajectory, ts));
    });
}

} // namespace fiber::cli
