// Scenario-driven entry point: solver runs, decay-criterion checks,
// classification and microlocal diagnostics, with machine-readable outputs.

#include "declab/error.hpp"
#include "declab/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"declab - periodic conservation-law decay laboratory"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    int threads = 1;
    std::uint64_t seed = 0;
    bool seed_set = false;

    app.add_option("--scenario", scenario_path, "scenario config (JSON)")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--override", overrides, "config override key.path=value (repeatable)");
    app.add_option("--threads", threads, "worker threads for refinement fan-out");
    app.add_option("--seed", seed, "seed override")->each([&](const std::string&) { seed_set = true; });

    for (const char* name : {"solve", "nd2", "decay", "wave", "microscope", "suite"})
        app.add_subcommand(name)->fallthrough();

    CLI11_PARSE(app, argc, argv);

    declab::RunContext ctx;
    ctx.out_dir = out_dir;
    ctx.threads = threads > 0 ? threads : 1;
    ctx.seed_override = seed_set;
    ctx.seed = seed;

    std::string sub = app.get_subcommands().front()->get_name();
    try {
        return declab::run_scenario(scenario_path, sub, overrides, ctx);
    } catch (const declab::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const declab::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 2;
    }
}
