#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include <christoffel/algorithms.hpp>
#include <christoffel/systems.hpp>

namespace christoffel::cli {

enum class AlgorithmKind { alg1, alg2, alg3 };

/// Everything a run needs, parsed and validated before any output exists.
struct RunConfig {
    std::string benchmark;
    ReachProblem problem;
    AlgorithmKind algorithm = AlgorithmKind::alg3;
    AlgorithmConfig settings;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::optional<std::string> grid;
    std::optional<std::int64_t> n_validation;
    double validation_delta = 0.01;
    std::optional<std::string> output_dir;
};

std::string_view to_string(AlgorithmKind kind);

/// Throws ConfigError naming the line (for syntax errors) or the field path.
RunConfig parse_run_config(const std::string& text, const std::string& origin = "config");
RunConfig load_run_config(const std::filesystem::path& path);

/// Benchmark problem with the config's parameter and box overrides applied.
ReachProblem build_problem(const std::string& benchmark, const nlohmann::json& section);

}  // namespace christoffel::cli
