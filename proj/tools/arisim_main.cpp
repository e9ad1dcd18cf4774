// Experiment runner for the UAV data-collection simulator. Loads a scenario
// file, applies command-line / environment overrides, trains and evaluates,
// and writes metrics, traces, and a manifest into the output directory.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "arisim/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ARIS-assisted multi-UAV uplink NOMA simulator"};

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> episodes;
    std::optional<std::string> scheme;
    std::optional<std::string> access;
    bool eval_only = false;
    bool trace = false;
    bool verbose = false;

    app.add_option("--config", config_path, "scenario file (JSON)")
        ->required()
        ->envname("ARISIM_CONFIG");
    app.add_option("--seed", seed, "master seed override")->envname("ARISIM_SEED");
    app.add_option("--episodes", episodes, "training episode override")
        ->envname("ARISIM_EPISODES");
    app.add_option("--scheme", scheme, "fixed-aris | dm-switching | all-active")
        ->envname("ARISIM_SCHEME");
    app.add_option("--access", access, "noma | tdma | fdma")->envname("ARISIM_ACCESS");
    app.add_option("--out", out_dir, "output directory")->envname("ARISIM_OUT");
    app.add_flag("--eval-only", eval_only, "skip training, evaluate only")
        ->envname("ARISIM_EVAL_ONLY");
    app.add_flag("--trace", trace, "write per-slot trajectory trace")->envname("ARISIM_TRACE");
    app.add_flag("--verbose", verbose, "write per-slot solver log")->envname("ARISIM_VERBOSE");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    arisim::RunConfig rc;
    rc.config_path = config_path;
    rc.out_dir = out_dir;
    rc.eval_only = eval_only;
    rc.trace = trace;
    rc.verbosity = verbose ? 1 : 0;
    rc.overrides.seed = seed;
    rc.overrides.episodes = episodes;
    try {
        if (scheme) rc.overrides.scheme = arisim::scheme_from_string(*scheme);
        if (access) rc.overrides.access = arisim::access_from_string(*access);
    } catch (const arisim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    return arisim::run_experiment(rc);
}
