#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "dynlab/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"equilibrium-measure and degree-growth experiments for "
                 "polynomial-like maps"};
    dynlab::CliOptions opts;
    std::string workers;
    uint64_t seed = 0;
    std::string out;

    app.add_option("--config", opts.config_path, "experiment config file (JSON)")
        ->required();
    auto* seed_opt = app.add_option("--seed", seed, "override the config RNG seed");
    auto* out_opt =
        app.add_option("--out", out, "output path prefix for .csv/.manifest/.cloud");
    auto* workers_opt =
        app.add_option("--workers", workers, "worker threads: a count or \"auto\"");

    CLI11_PARSE(app, argc, argv);

    if (seed_opt->count() > 0) opts.seed = seed;
    if (out_opt->count() > 0) opts.out_prefix = out;
    if (workers_opt->count() > 0) opts.workers = workers;

    return dynlab::run_experiment(opts, std::cerr);
}
