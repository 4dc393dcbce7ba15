#include <fiber/cli/commands.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Inextensible elastic fiber dynamics"};
    app.require_subcommand(1);

    std::string config, out, kind, traj, times;
    bool timing = false;

    auto* sim = app.add_subcommand("simulate", "run one scenario and write its trajectory");
    sim->add_option("--config", config, "JSON configuration")->required();
    sim->add_option("--out", out, "output directory")->required();
    sim->add_flag("--timing", timing, "add wall-clock columns (output no longer reproducible)");

    auto* st = app.add_subcommand("study", "run a time-step study");
    st->add_option("--config", config, "JSON configuration")->required();
    st->add_option("--kind", kind, "convergence, elongation or bound")
        ->required()
        ->check(CLI::IsMember({"convergence", "elongation", "bound"}));
    st->add_option("--out", out, "output directory")->required();

    auto* rd = app.add_subcommand("render", "draw fiber snapshots as SVG");
    rd->add_option("--traj", traj, "trajectory file")->required();
    rd->add_option("--out", out, "SVG path")->required();
    rd->add_option("--times", times, "comma separated times")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : fiber::cli::kExitFailure;
    }

    if (*sim)
        return fiber::cli::simulate(config, out, timing, std::cerr);
    if (*st)
        return fiber::cli::study(config, kind, out, std::cerr);
    return fiber::cli::render(traj, out, times, std::cerr);
}
