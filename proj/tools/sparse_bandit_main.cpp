#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "sparse_bandit/cli.hpp"

namespace {

using namespace sparse_bandit;

// Flags mirror the config-file keys so both go through apply_setting.
const char* const kKeys[] = {"d",       "s",    "mu1",  "delta-s", "means",    "policy",  "forcelog",
                             "horizon", "reps", "seed", "threads", "out",      "preset",  "epsilon"};

struct FlagSet {
    std::string config_path;
    std::map<std::string, std::string> values;
};

void add_flags(CLI::App& cmd, FlagSet& flags) {
    cmd.add_option("--config", flags.config_path, "key = value configuration file (flags override it)");
    for (const char* key : kKeys) {
        cmd.add_option(std::string("--") + key, flags.values[key]);
    }
}

cli::RunSpec build_spec(const CLI::App& cmd, const FlagSet& flags) {
    cli::RunSpec spec = flags.config_path.empty() ? cli::RunSpec{} : cli::parse_config_file(flags.config_path);
    for (const char* key : kKeys) {
        if (cmd.count(std::string("--") + key) > 0) {
            cli::apply_setting(spec, key, flags.values.at(key), std::string("--") + key);
        }
    }
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse stochastic bandits: SparseUCB simulation and asymptotic regret lower bounds"};
    app.require_subcommand(1);

    FlagSet sim_flags;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo regret of UCB and SparseUCB (regret/events/lemmas CSV)");
    add_flags(*simulate, sim_flags);

    FlagSet lb_flags;
    auto* lower_bound = app.add_subcommand("lower-bound", "Asymptotic regret lower bound table (bound.csv)");
    add_flags(*lower_bound, lb_flags);

    auto* presets = app.add_subcommand("presets", "Experiment presets");
    presets->require_subcommand(1);
    auto* presets_list = presets->add_subcommand("list", "List preset names and parameters");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) return cli::cmd_simulate(build_spec(*simulate, sim_flags), std::cout, std::cerr);
        if (*lower_bound) return cli::cmd_lower_bound(build_spec(*lower_bound, lb_flags), std::cout, std::cerr);
        if (*presets_list) return cli::cmd_presets_list(std::cout);
    } catch (const BanditError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
