// chv: coded-exposure holographic video bench driver.
//
// Subcommands: masks | simulate | reconstruct | analyze | benchmark.
// One JSON config drives everything; --out and --seed override the
// config's output_dir and seed. Exit codes: 0 ok, 1 usage/config,
// 2 validation failure, 3 numerical abort.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "chv/errors.hpp"
#include "chv/experiments.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 1;
    bool quiet = false;
};

chv::ExperimentConfig load_config(const CommonOpts& opts) {
    chv::ExperimentConfig cfg = opts.config_path.empty()
                                    ? chv::ExperimentConfig()
                                    : chv::ExperimentConfig::load(opts.config_path);
    if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
    if (opts.seed_set) cfg.seed = opts.seed;
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_jobs = false) {
    cmd->add_option("--config", opts.config_path, "JSON experiment config")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", opts.seed, "seed (overrides config)")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
    if (with_jobs) cmd->add_option("--jobs", opts.jobs, "concurrent sweep cells");
    cmd->add_flag("--quiet", opts.quiet, "suppress progress notes");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coded-exposure compressive holographic video bench"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto* cmd_masks = app.add_subcommand("masks", "generate and validate modulation masks");
    add_common(cmd_masks, opts);
    auto* cmd_simulate = app.add_subcommand("simulate", "build a scene and simulate capture");
    add_common(cmd_simulate, opts);
    auto* cmd_reconstruct =
        app.add_subcommand("reconstruct", "run BP and/or CS reconstruction on a hologram");
    add_common(cmd_reconstruct, opts);
    auto* cmd_analyze =
        app.add_subcommand("analyze", "focus profiles, particle detection, tracks, velocities");
    add_common(cmd_analyze, opts);
    auto* cmd_benchmark =
        app.add_subcommand("benchmark", "subsampling x depth-spacing PSNR sweep");
    add_common(cmd_benchmark, opts, true);

    CLI11_PARSE(app, argc, argv);

    try {
        const chv::ExperimentConfig cfg = load_config(opts);
        if (cmd_masks->parsed()) return chv::run_masks(cfg, opts.quiet);
        if (cmd_simulate->parsed()) return chv::run_simulate(cfg, opts.quiet);
        if (cmd_reconstruct->parsed()) return chv::run_reconstruct(cfg, opts.quiet);
        if (cmd_analyze->parsed()) return chv::run_analyze(cfg, opts.quiet);
        if (cmd_benchmark->parsed()) return chv::run_benchmark(cfg, opts.jobs, opts.quiet);
    } catch (const chv::NumericalError& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return chv::kExitNumerical;
    } catch (const chv::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return chv::kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return chv::kExitUsage;
    }
    return chv::kExitUsage;
}
