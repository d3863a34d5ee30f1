#include "christoffel_cli/commands.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <christoffel/algorithms.hpp>
#include <christoffel/bounds.hpp>
#include <christoffel/error.hpp>
#include <christoffel/format.hpp>
#include <christoffel/grid.hpp>
#include <christoffel/polybasis.hpp>
#include <christoffel/serialization.hpp>
#include <christoffel/systems.hpp>

#include "christoffel_cli/config.hpp"

namespace christoffel::cli {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream s;
    s << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

SupportEstimate load_estimate(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": malformed JSON (" + e.what() + ")");
    }
    return estimate_from_json(doc);
}

std::vector<std::string> axis_names(const SupportEstimate& estimate) {
    if (static_cast<int>(estimate.coordinate_names.size()) == estimate.dim()) return estimate.coordinate_names;
    std::vector<std::string> names;
    for (int i = 1; i <= estimate.dim(); ++i) names.push_back("x" + std::to_string(i));
    return names;
}

std::string grid_csv(const SupportEstimate& estimate, const std::vector<GridAxis>& axes) {
    const GridEvaluation grid = evaluate_grid(estimate, axes);
    std::ostringstream out;
    write_grid_csv(out, axis_names(estimate), grid);
    return out.str();
}

}  // namespace

int cmd_sample_bound(double epsilon, double delta, int n, int m, std::ostream& out, std::ostream& err) {
    try {
        const std::uint64_t d = basis_dimension(n, 2 * m);
        const std::uint64_t count = classical_sample_bound(epsilon, delta, d);
        out << "d=" << d << "\nN=" << count << "\n";
        return kOk;
    } catch (const std::exception& e) {
        err << "sample-bound: " << e.what() << "\n";
        return kUsage;
    }
}

int cmd_estimate(const EstimateOptions& options, std::ostream& err) {
    RunConfig cfg;
    std::optional<std::vector<GridAxis>> axes;
    std::optional<std::int64_t> n_validation;
    try {
        cfg = load_run_config(options.config);
        if (options.seed) cfg.seed = *options.seed;
        if (const auto spec = options.grid ? options.grid : cfg.grid) {
            axes = parse_grid_spec(*spec);
            if (static_cast<int>(axes->size()) != cfg.problem.output_dim()) {
                throw ConfigError("grid has " + std::to_string(axes->size()) + " axes but the problem output has " +
                                  std::to_string(cfg.problem.output_dim()) + " coordinates");
            }
        }
        n_validation = options.n_validation ? options.n_validation : cfg.n_validation;
        if (n_validation && *n_validation < 1) throw ConfigError("n_validation must be >= 1");
    } catch (const std::exception& e) {
        err << "estimate: " << e.what() << "\n";
        return kUsage;
    }
    const fs::path out_dir = options.out_dir ? *options.out_dir : fs::path(cfg.output_dir.value_or("."));

    std::ostringstream log;
    log << "# christoffel estimate, started " << timestamp() << "\n";
    log << "config " << options.config.string() << " benchmark " << cfg.benchmark << " algorithm "
        << to_string(cfg.algorithm) << " seed " << cfg.seed << "\n";
    const ProgressLog progress = [&](const std::string& line) {
        log << line << "\n";
        err << line << "\n";
    };

    const ReachSampler sampler(cfg.problem, cfg.seed, cfg.workers);
    std::optional<AlgorithmResult> result;
    try {
        switch (cfg.algorithm) {
            case AlgorithmKind::alg1: result = algorithm1(sampler, cfg.settings, progress); break;
            case AlgorithmKind::alg2: result = algorithm2(sampler, cfg.settings, progress); break;
            case AlgorithmKind::alg3: result = algorithm3(sampler, cfg.settings, progress); break;
        }
    } catch (const CapacityError& e) {
        err << "estimate: " << e.what() << "\n";
        return kCapacity;
    } catch (const ArgumentError& e) {
        err << "estimate: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "estimate: " << e.what() << "\n";
        return kFailure;
    }

    SupportEstimate& estimate = result->estimate;
    estimate.coordinate_names = cfg.problem.output_names();
    const PacCertificate& cert = *estimate.certificate();

    try {
        fs::create_directories(out_dir);
        std::ostringstream samples;
        write_csv(samples, estimate.coordinate_names, result->samples);
        std::optional<std::string> grid;
        if (axes) grid = grid_csv(estimate, *axes);
        std::optional<std::string> validation;
        if (n_validation) {
            const CoverageReport report = validate_estimate(estimate, sampler, *n_validation, cfg.validation_delta);
            progress("validation: coverage=" + format_double(report.point_estimate) +
                     " lower_bound=" + format_double(report.lower_bound) + " n=" + std::to_string(report.total));
            validation = dump(to_json(report));
        }
        progress(std::string("status ") + std::string(to_string(cert.status)) + " N=" + std::to_string(cert.n_samples) +
                 " achieved_epsilon=" + format_double(cert.achieved_epsilon()));

        write_file(out_dir / "estimate.json", dump(to_json(estimate)));
        write_file(out_dir / "certificate.json", dump(to_json(cert)));
        write_file(out_dir / "samples.csv", samples.str());
        if (grid) write_file(out_dir / "grid.csv", *grid);
        if (validation) write_file(out_dir / "validation.json", *validation);
        write_file(out_dir / "log", log.str());
    } catch (const std::exception& e) {
        err << "estimate: " << e.what() << "\n";
        return kFailure;
    }
    return cert.status == CertificateStatus::certified ? kOk : kNotTerminated;
}

int cmd_grid(const fs::path& estimate_path, const std::string& grid_spec, const fs::path& out_dir, std::ostream& err) {
    std::string csv;
    try {
        const SupportEstimate estimate = load_estimate(estimate_path);
        const auto axes = parse_grid_spec(grid_spec);
        if (static_cast<int>(axes.size()) != estimate.dim()) {
            throw ArgumentError("grid has " + std::to_string(axes.size()) + " axes, estimate has dimension " +
                                std::to_string(estimate.dim()));
        }
        csv = grid_csv(estimate, axes);
    } catch (const std::exception& e) {
        err << "grid: " << e.what() << "\n";
        return kUsage;
    }
    try {
        fs::create_directories(out_dir);
        write_file(out_dir / "grid.csv", csv);
    } catch (const std::exception& e) {
        err << "grid: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}

int cmd_validate(const fs::path& estimate_path, const fs::path& config_path, std::int64_t n_validation,
                 std::optional<std::uint64_t> seed, const fs::path& out_dir, std::ostream& err) {
    std::optional<SupportEstimate> estimate;
    RunConfig cfg;
    try {
        if (n_validation < 1) throw ArgumentError("n_validation must be >= 1");
        estimate.emplace(load_estimate(estimate_path));
        cfg = load_run_config(config_path);
        if (seed) cfg.seed = *seed;
        if (cfg.problem.output_dim() != estimate->dim()) {
            throw ArgumentError("problem output dimension " + std::to_string(cfg.problem.output_dim()) +
                                " does not match estimate dimension " + std::to_string(estimate->dim()));
        }
        if (!estimate->coordinate_names.empty() && estimate->coordinate_names != cfg.problem.output_names()) {
            throw ArgumentError("problem coordinates do not match the estimate's coordinates");
        }
    } catch (const std::exception& e) {
        err << "validate: " << e.what() << "\n";
        return kUsage;
    }
    try {
        const ReachSampler sampler(cfg.problem, cfg.seed, cfg.workers);
        const CoverageReport report = validate_estimate(*estimate, sampler, n_validation, cfg.validation_delta);
        fs::create_directories(out_dir);
        write_file(out_dir / "validation.json", dump(to_json(report)));
    } catch (const std::exception& e) {
        err << "validate: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}

}  // namespace christoffel::cli
