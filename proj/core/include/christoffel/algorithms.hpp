#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "christoffel/bounds.hpp"
#include "christoffel/estimators.hpp"
#include "christoffel/sampling.hpp"

namespace christoffel {

enum class KlMode { dense, spectral_truncated };
/// How the returned kernel estimate is evaluated. nystrom returns a superset
/// of the certified exact set (its values never exceed the exact ones), so
/// the certificate carries over.
enum class KernelEvaluation { exact, nystrom };

std::string_view to_string(KlMode mode);
KlMode parse_kl_mode(std::string_view text);
std::string_view to_string(KernelEvaluation evaluation);
KernelEvaluation parse_kernel_evaluation(std::string_view text);

struct AlgorithmConfig {
    double epsilon = 0.1;
    double delta = 1e-9;
    double sigma0_sq = 1e-3;
    int degree = 1;                     // polynomial algorithms
    std::optional<KernelSpec> kernel;   // kernel algorithm
    std::optional<double> eta;          // defaulted per algorithm when empty
    Eigen::Index initial_samples = 1000;
    Eigen::Index batch_size = 1000;
    int max_iterations = 200;
    /// Stop (not terminated) rather than grow the dataset past this size.
    std::optional<Eigen::Index> max_samples;

    KlMode kl_mode = KlMode::dense;
    Eigen::Index kl_rank = 500;  // eigenvalues kept by spectral_truncated
    KlVariant kl_variant = KlVariant::moment_inverse;

    KernelEvaluation evaluation = KernelEvaluation::exact;
    Eigen::Index nystrom_rank = 1000;
    LandmarkSelection landmarks{};
    Eigen::Index gram_capacity = kDefaultGramCapacity;

    /// Guard on C(n+m, n) for the polynomial algorithms.
    std::uint64_t max_basis_dimension = 5000;
    /// Fixed coordinate map applied before fitting; identity when empty.
    std::optional<AffineInputMap> input_map;

    /// Throws ArgumentError on out-of-range fields.
    void validate() const;
};

/// Kernel algorithm default threshold.
inline constexpr double kDefaultKernelEta = 0.15;
/// Polynomial default threshold C(n + 2m, n) / epsilon.
double default_poly_eta(int n, int m, double epsilon);

struct AlgorithmResult {
    SupportEstimate estimate;
    Dataset samples;  // training cloud in original coordinates
};

/// Receives one human-readable line per completed step.
using ProgressLog = std::function<void(const std::string&)>;

/// Classical VC bound: one fit on N = classical_sample_bound samples,
/// threshold = largest training value.
AlgorithmResult algorithm1(const SampleSource& source, const AlgorithmConfig& config, const ProgressLog& log = {});
/// Iterative PAC-Bayes with the kernelized estimator.
AlgorithmResult algorithm2(const SampleSource& source, const AlgorithmConfig& config, const ProgressLog& log = {});
/// Iterative PAC-Bayes with the polynomial estimator.
AlgorithmResult algorithm3(const SampleSource& source, const AlgorithmConfig& config, const ProgressLog& log = {});

struct CoverageReport {
    std::int64_t hits = 0;
    std::int64_t total = 0;
    double point_estimate = 0.0;
    double lower_bound = 0.0;  // one-sided Clopper-Pearson at level 1 - confidence_delta
    double confidence_delta = 0.01;
};

/// One-sided exact binomial lower confidence bound for a success rate.
double clopper_pearson_lower(std::int64_t successes, std::int64_t trials, double delta);

/// Monte Carlo coverage of an estimate on fresh samples drawn from `stream`.
CoverageReport validate_estimate(const SupportEstimate& estimate, const SampleSource& source,
                                 Eigen::Index n_validation, double confidence_delta = 0.01,
                                 std::uint64_t stream = kValidationStream);

}  // namespace christoffel
