// Batch front-end: run experiment configs, validate them, and list the
// kernel / signal registries.
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "maxiset/config.hpp"
#include "maxiset/kernel.hpp"
#include "maxiset/parallel.hpp"
#include "maxiset/report.hpp"
#include "maxiset/zoo.hpp"

int main(int argc, char** argv) {
    CLI::App app{"maxilab: sup-norm kernel estimation laboratory"};
    app.set_version_flag("--version", std::string("maxilab ") + maxiset::kToolVersion);
    app.require_subcommand(1);

    std::string config_path;
    maxiset::RunOptions options;
    options.threads = maxiset::default_threads();
    if (const char* env_dir = std::getenv("MAXILAB_OUT_DIR")) options.out_dir = env_dir;
    std::uint64_t seed_value = 0;

    CLI::App* run = app.add_subcommand("run", "run all experiments in a config");
    run->add_option("config", config_path, "experiment config (JSON)")->required();
    run->add_option("--out", options.out_dir, "output directory");
    CLI::Option* seed_opt = run->add_option("--seed", seed_value, "override the config seed");
    run->add_option("--threads", options.threads, "worker threads");
    run->add_flag("--svg", options.svg, "also write SVG plots");

    CLI::App* validate = app.add_subcommand("validate", "validate a config and print its hash");
    validate->add_option("config", config_path, "experiment config (JSON)")->required();

    CLI::App* kernels = app.add_subcommand("kernels", "kernel registry");
    kernels->add_subcommand("list", "list kernel registry names");

    CLI::App* zoo = app.add_subcommand("zoo", "signal registry");
    zoo->add_subcommand("list", "list signal registry names");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (seed_opt->count() > 0) options.seed_override = seed_value;
        return maxiset::run_config(config_path, options, std::cout);
    }
    if (validate->parsed()) return maxiset::validate_config(config_path, std::cout);
    if (kernels->parsed()) {
        for (const auto& name : maxiset::kernel_registry_names())
            std::cout << name << "\n";
        return 0;
    }
    if (zoo->parsed()) {
        for (const auto& name : maxiset::zoo_registry_names())
            std::cout << name << "\n";
        return 0;
    }
    return 0;
}
