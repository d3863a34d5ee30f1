#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace christoffel::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNotTerminated = 3, kCapacity = 4, kFailure = 1 };

/// Prints the VC dimension C(n+2m, n) and the classical sample size.
int cmd_sample_bound(double epsilon, double delta, int n, int m, std::ostream& out, std::ostream& err);

struct EstimateOptions {
    std::filesystem::path config;
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> grid;            // also write grid.csv
    std::optional<std::int64_t> n_validation;   // also write validation.json
};

/// Writes estimate.json, certificate.json, samples.csv and log into the
/// output directory. Files appear only after the run finishes.
int cmd_estimate(const EstimateOptions& options, std::ostream& err);

/// Writes grid.csv for a stored estimate.
int cmd_grid(const std::filesystem::path& estimate, const std::string& grid_spec, const std::filesystem::path& out_dir,
             std::ostream& err);

/// Writes validation.json: Monte Carlo coverage on the config's problem.
int cmd_validate(const std::filesystem::path& estimate, const std::filesystem::path& config, std::int64_t n_validation,
                 std::optional<std::uint64_t> seed, const std::filesystem::path& out_dir, std::ostream& err);

}  // namespace christoffel::cli
