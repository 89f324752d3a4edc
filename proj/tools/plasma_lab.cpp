#include <CLI11.hpp>

#include <iostream>

#include "plasma_lab/commands.hpp"

int main(int argc, char** argv) {
    using namespace plasma_lab;

    CLI::App app{"Bi-temperature drift-fluid slab laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    auto* simulate = app.add_subcommand("simulate", "run one configured simulation");
    simulate->add_option("--config", config_path, "run configuration (flat TOML)")->required();

    double t_plus = 0.0, t_minus = 0.0, box = 1.0;
    std::string side;
    int k_max = 4;
    std::string modes_dir = ".";
    auto* modes = app.add_subcommand("modes", "scan linear modes and report the dominant one");
    modes->add_option("--tplus", t_plus, "hot temperature T+")->required();
    modes->add_option("--tminus", t_minus, "cold temperature T-")->required();
    modes->add_option("--box", box, "box length L")->required();
    modes->add_option("--side", side, "good or bad")->required();
    modes->add_option("--kmax", k_max, "largest |k1|, |k2| scanned")->required();
    modes->add_option("--out-dir", modes_dir, "directory for modes.csv");

    ParticleState p0;
    double dt = 1e-3;
    long steps = 0, decimate = 1;
    std::string trace_path = "trace.csv";
    auto* trace = app.add_subcommand("trace", "integrate a drift orbit");
    trace->add_option("--x1", p0.x1, "initial position x1")->required();
    trace->add_option("--x2", p0.x2, "initial position x2")->required();
    trace->add_option("--v1", p0.v1, "initial velocity v1")->required();
    trace->add_option("--v2", p0.v2, "initial velocity v2")->required();
    trace->add_option("--dt", dt, "RK4 step")->required();
    trace->add_option("--steps", steps, "number of steps")->required();
    trace->add_option("--decimate", decimate, "keep every n-th step");
    trace->add_option("--out", trace_path, "output CSV path");

    std::string sweep_config, gradients;
    auto* sweep = app.add_subcommand("sweep", "run one simulation per temperature gradient");
    sweep->add_option("--config", sweep_config, "base run configuration")->required();
    sweep->add_option("--gradients", gradients, "comma-separated gradients (T+ - T-)/L")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (*simulate) return cmd_simulate(config_path, std::cout, std::cerr);
    if (*modes) return cmd_modes(t_plus, t_minus, box, side, k_max, modes_dir, std::cout, std::cerr);
    if (*trace) return cmd_trace(p0, dt, steps, decimate, trace_path, std::cout, std::cerr);
    return cmd_sweep(sweep_config, gradients, std::cout, std::cerr);
}
