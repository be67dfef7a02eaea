#include <CLI11.hpp>
#include <iostream>

#include "starscat/experiment.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<unsigned long long> seed;
    std::optional<int> threads;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Config file path");
    cmd->add_option("--out", flags.out_dir, "Output directory");
    cmd->add_option("--seed", flags.seed, "Oracle RNG seed");
    cmd->add_option("--threads", flags.threads, "Worker thread count");
    cmd->add_option("--set", flags.overrides, "Override: section.key=value");
}

starscat::ExperimentConfig resolve(const CommonFlags& flags) {
    starscat::ExperimentConfig cfg;
    if (!flags.config_path.empty()) cfg = starscat::parse_config_file(flags.config_path);
    for (const std::string& o : flags.overrides) starscat::apply_override(cfg, o);
    if (!flags.out_dir.empty()) cfg.output.dir = flags.out_dir;
    if (flags.seed) cfg.oracle.seed = *flags.seed;
    if (flags.threads) cfg.threads = *flags.threads;
    starscat::validate_config(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random-surface scattering experiments"};
    app.require_subcommand(1);

    CommonFlags flags;
    CLI::App* grid = app.add_subcommand("grid", "Export coarea and naive grids as CSV");
    CLI::App* reconstruct =
        app.add_subcommand("reconstruct", "Kernel error table over (kappa, L)");
    CLI::App* gpc = app.add_subcommand("gpc", "Expansion coefficient tables per kappa");
    CLI::App* validate =
        app.add_subcommand("validate", "Monte Carlo comparison against the gPC estimate");
    for (CLI::App* c : {grid, reconstruct, gpc, validate}) add_common(c, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        const starscat::ExperimentConfig cfg = resolve(flags);
        if (grid->parsed()) starscat::run_grid(cfg);
        if (reconstruct->parsed()) starscat::run_reconstruct(cfg);
        if (gpc->parsed()) starscat::run_gpc(cfg);
        if (validate->parsed()) starscat::run_validate(cfg);
    } catch (const starscat::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const starscat::NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
