// Command-line driver: fraccond <forward|dn|reduce|invert|walk|limits> --config file.json

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fraccond/cli/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Fractional conductivity equation: forward solves, DN maps, reconstruction, walks and s->1 limits"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    int threads = 0;
    for (const auto& name : fraccond::cli::command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "configuration file (schema v1)")->required();
        sub->add_option("--out", out, "output directory, overrides the config");
        sub->add_option("--seed", seed, "random seed, overrides the config");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::NonNegativeNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return fraccond::cli::kConfigError;
    }

    CLI::App* chosen = app.get_subcommands().front();
    const std::optional<std::string> out_opt = chosen->count("--out") ? std::optional{out} : std::nullopt;
    const std::optional<std::uint64_t> seed_opt = chosen->count("--seed") ? std::optional{seed} : std::nullopt;
    return fraccond::cli::run(chosen->get_name(), config, out_opt, seed_opt, threads, std::cerr);
}
