#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "christoffel_cli/commands.hpp"

namespace cli = christoffel::cli;

int main(int argc, char** argv) {
    CLI::App app{"Support estimation with inverse Christoffel functions and PAC certificates"};
    app.require_subcommand(1);

    double epsilon = 0.1;
    double delta = 1e-9;
    int n = 1;
    int m = 0;
    auto* bound = app.add_subcommand("sample-bound", "Print the VC dimension and classical sample size");
    bound->add_option("--epsilon", epsilon, "Accuracy in (0,1)")->required();
    bound->add_option("--delta", delta, "Confidence in (0,1)")->required();
    bound->add_option("--n", n, "State dimension")->required();
    bound->add_option("--m", m, "Polynomial degree")->required();

    cli::EstimateOptions est;
    std::string est_config;
    std::string est_out;
    std::uint64_t est_seed = 0;
    std::string est_grid;
    std::int64_t est_validation = 0;
    auto* estimate = app.add_subcommand("estimate", "Run the configured algorithm and write its artifacts");
    estimate->add_option("--config", est_config, "Run configuration (JSON)")->required();
    auto* est_out_opt = estimate->add_option("--out", est_out, "Output directory");
    auto* est_seed_opt = estimate->add_option("--seed", est_seed, "Override the configured seed");
    auto* est_grid_opt = estimate->add_option("--grid", est_grid, "Also write grid.csv, e.g. -2:2:400,-2:2:400");
    auto* est_val_opt = estimate->add_option("--n-validation", est_validation, "Also write validation.json");

    std::string grid_estimate;
    std::string grid_spec;
    std::string grid_out = ".";
    auto* grid = app.add_subcommand("grid", "Evaluate a stored estimate on a grid");
    grid->add_option("estimate", grid_estimate, "estimate.json")->required();
    grid->add_option("--grid", grid_spec, "lo:hi:count per axis, comma separated")->required();
    grid->add_option("--out", grid_out, "Output directory");

    std::string val_estimate;
    std::string val_config;
    std::int64_t val_n = 0;
    std::uint64_t val_seed = 0;
    std::string val_out = ".";
    auto* validate = app.add_subcommand("validate", "Monte Carlo coverage of a stored estimate");
    validate->add_option("estimate", val_estimate, "estimate.json")->required();
    validate->add_option("--config", val_config, "Configuration defining the problem")->required();
    validate->add_option("--n-validation", val_n, "Number of fresh samples")->required();
    auto* val_seed_opt = validate->add_option("--seed", val_seed, "Override the configured seed");
    validate->add_option("--out", val_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kUsage;
    }

    if (*bound) return cli::cmd_sample_bound(epsilon, delta, n, m, std::cout, std::cerr);
    if (*estimate) {
        est.config = est_config;
        if (*est_out_opt) est.out_dir = est_out;
        if (*est_seed_opt) est.seed = est_seed;
        if (*est_grid_opt) est.grid = est_grid;
        if (*est_val_opt) est.n_validation = est_validation;
        return cli::cmd_estimate(est, std::cerr);
    }
    if (*grid) return cli::cmd_grid(grid_estimate, grid_spec, grid_out, std::cerr);
    std::optional<std::uint64_t> seed;
    if (*val_seed_opt) seed = val_seed;
    return cli::cmd_validate(val_estimate, val_config, val_n, seed, val_out, std::cerr);
}
