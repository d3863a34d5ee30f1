#include "christoffel/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "christoffel/error.hpp"
#include "christoffel/format.hpp"
#include "christoffel/linalg.hpp"
#include "christoffel/polybasis.hpp"

namespace christoffel {

std::string_view to_string(KlMode mode) { return mode == KlMode::dense ? "dense" : "spectral_truncated"; }

KlMode parse_kl_mode(std::string_view text) {
    if (text == "dense") return KlMode::dense;
    if (text == "spectral_truncated") return KlMode::spectral_truncated;
    throw ArgumentError("unknown kl_mode '" + std::string(text) + "'");
}

std::string_view to_string(KernelEvaluation evaluation) {
    return evaluation == KernelEvaluation::exact ? "exact" : "nystrom";
}

KernelEvaluation parse_kernel_evaluation(std::string_view text) {
    if (text == "exact") return KernelEvaluation::exact;
    if (text == "nystrom") return KernelEvaluation::nystrom;
    throw ArgumentError("unknown evaluation '" + std::string(text) + "'");
}

void AlgorithmConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ArgumentError("epsilon must lie in (0, 1]");
    if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
    if (!(sigma0_sq > 0.0) || !std::isfinite(sigma0_sq)) throw ArgumentError("sigma0_sq must be positive");
    if (degree < 0) throw ArgumentError("degree must be >= 0");
    if (eta && !(*eta > 0.0)) throw ArgumentError("eta must be positive");
    if (initial_samples < 1 || batch_size < 1) throw ArgumentError("initial and batch sample sizes must be >= 1");
    if (max_iterations < 1) throw ArgumentError("max_iterations must be >= 1");
    if (max_samples && *max_samples < initial_samples) throw ArgumentError("max_samples is below the initial size");
    if (kl_rank < 1 || nystrom_rank < 1 || gram_capacity < 1) throw ArgumentError("ranks and capacity must be >= 1");
}

double default_poly_eta(int n, int m, double epsilon) {
    return static_cast<double>(basis_dimension(n, 2 * m)) / epsilon;
}

namespace {

void emit(const ProgressLog& log, const std::string& line) {
    if (log) log(line);
}

std::string describe(const IterationRecord& r) {
    std::ostringstream s;
    s << "iteration " << r.iteration << ": N=" << r.n_samples << " risk=" << format_double(r.empirical_risk)
      << " kl=" << format_double(r.kl_divergence) << " r_bar=" << format_double(r.risk_bound)
      << " eps=" << format_double(r.epsilon);
    return s.str();
}

Dataset mapped(const AlgorithmConfig& config, const Dataset& data) {
    return config.input_map ? config.input_map->apply(data) : data;
}

void check_source(const SampleSource& source, const AlgorithmConfig& config) {
    if (config.input_map && config.input_map->dim() != source.dim()) {
        throw ArgumentError("input map dimension does not match the sample source");
    }
}

MultiIndexBasis checked_basis(int n, const AlgorithmConfig& config) {
    const std::uint64_t d = basis_dimension(n, config.degree);
    if (d > config.max_basis_dimension) {
        throw CapacityError("basis dimension " + std::to_string(d) + " exceeds max_basis_dimension " +
                            std::to_string(config.max_basis_dimension));
    }
    return MultiIndexBasis(n, config.degree);
}

// Shared PAC-Bayes loop. `evaluate(data, iteration)` fits on the mapped data
// and returns (empirical risk, kl); `finish(data)` builds the final estimator.
template <class Step, class Finish>
AlgorithmResult pacbayes_loop(const SampleSource& source, const AlgorithmConfig& config, CertificateMethod method,
                              double eta, const ProgressLog& log, Step&& step, Finish&& finish) {
    SampleCursor cursor(source, kTrainingStream);
    Dataset samples = cursor.next(config.initial_samples);

    PacCertificate cert;
    cert.method = method;
    cert.epsilon = config.epsilon;
    cert.delta = config.delta;
    cert.status = CertificateStatus::certified;

    double current_epsilon = 1.0;
    int iteration = 0;
    std::optional<ChristoffelEstimator> estimator;
    while (current_epsilon > config.epsilon) {
        if (iteration >= config.max_iterations ||
            (config.max_samples && samples.size() + config.batch_size > *config.max_samples)) {
            cert.status = CertificateStatus::not_terminated;
            emit(log, "stopping without reaching epsilon: iteration or sample budget exhausted");
            break;
        }
        ++iteration;
        samples.append(cursor.next(config.batch_size));
        estimator.reset();  // release the previous factor before building the next
        auto [risk, kl, fitted] = step(mapped(config, samples));
        estimator.emplace(std::move(fitted));
        const IterationRecord record = make_iteration_record(iteration, samples.size(), risk, kl, config.delta);
        cert.trace.push_back(record);
        emit(log, describe(record));
        current_epsilon = record.epsilon;
    }
    cert.n_samples = samples.size();
    ChristoffelEstimator final_estimator = finish(mapped(config, samples), std::move(estimator));
    SupportEstimate estimate(std::move(final_estimator), eta, config.input_map, std::move(cert));
    return {std::move(estimate), std::move(samples)};
}

struct StepResult {
    double risk;
    double kl;
    ChristoffelEstimator estimator;
};

std::vector<double> conservative_top(const linalg::TopEigenvalues& top) {
    std::vector<double> values;
    for (std::size_t i = 0; i < top.values.size(); ++i) {
        values.push_back(std::max(top.values[i], 0.0) + top.residuals[i]);
    }
    std::sort(values.begin(), values.end(), std::greater<>());
    return values;
}

// Top eigenvalues of the Gramian without storing it: K x in row blocks.
linalg::TopEigenvalues matrix_free_top(const KernelSpec& kernel, const Dataset& data, Eigen::Index count) {
    const Eigen::Index n = data.size();
    constexpr Eigen::Index block = 512;
    const auto apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        y.resize(n);
        for (Eigen::Index first = 0; first < n; first += block) {
            const Eigen::Index rows = std::min(block, n - first);
            const Dataset slice(PointMatrix(data.matrix().middleRows(first, rows)));
            y.segment(first, rows).noalias() = kernel.cross(slice, data) * x;
        }
    };
    return linalg::top_eigenvalues(apply, n, count, 1e-10);
}

}  // namespace

AlgorithmResult algorithm1(const SampleSource& source, const AlgorithmConfig& config, const ProgressLog& log) {
    config.validate();
    check_source(source, config);
    const int n = source.dim();
    MultiIndexBasis basis = checked_basis(n, config);
    const std::uint64_t vc = basis_dimension(n, 2 * config.degree);
    const std::uint64_t count = classical_sample_bound(config.epsilon, config.delta, vc);
    emit(log, "classical bound: vc_dimension=" + std::to_string(vc) + " N=" + std::to_string(count));

    SampleCursor cursor(source, kTrainingStream);
    Dataset samples = cursor.next(static_cast<Eigen::Index>(count));
    auto est = PolyChristoffelEstimator::fit(mapped(config, samples), std::move(basis), config.sigma0_sq);
    const double alpha = est.evaluate(mapped(config, samples)).maxCoeff();
    emit(log, "threshold alpha=" + format_double(alpha));

    PacCertificate cert;
    cert.method = CertificateMethod::classical;
    cert.status = CertificateStatus::certified;
    cert.epsilon = config.epsilon;
    cert.delta = config.delta;
    cert.n_samples = static_cast<std::int64_t>(count);
    cert.vc_dimension = vc;
    SupportEstimate estimate(std::move(est), alpha, config.input_map, std::move(cert));
    return {std::move(estimate), std::move(samples)};
}

AlgorithmResult algorithm3(const SampleSource& source, const AlgorithmConfig& config, const ProgressLog& log) {
    config.validate();
    check_source(source, config);
    const int n = source.dim();
    const MultiIndexBasis basis = checked_basis(n, config);
    const double eta = config.eta.value_or(default_poly_eta(n, config.degree, config.epsilon));
    emit(log, "threshold eta=" + format_double(eta) + " basis dimension=" + std::to_string(basis.size()));

    auto step = [&](const Dataset& data) {
        auto est = PolyChristoffelEstimator::fit(data, basis, config.sigma0_sq);
        const Eigen::VectorXd values = est.evaluate(data);
        const double risk = empirical_stochastic_risk({values.data(), static_cast<std::size_t>(values.size())}, eta);
        const double kl = gaussian_kl_poly(est.factor(), config.sigma0_sq, config.kl_variant);
        return StepResult{risk, kl, std::move(est)};
    };
    auto finish = [&](const Dataset& data, std::optional<ChristoffelEstimator> fitted) -> ChristoffelEstimator {
        if (fitted) return std::move(*fitted);
        return PolyChristoffelEstimator::fit(data, basis, config.sigma0_sq);
    };
    return pacbayes_loop(source, config, CertificateMethod::pacbayes_poly, eta, log, step, finish);
}

AlgorithmResult algorithm2(const SampleSource& source, const AlgorithmConfig& config, const ProgressLog& log) {
    config.validate();
    check_source(source, config);
    if (!config.kernel) throw ArgumentError("the kernel algorithm needs a kernel");
    const KernelSpec& kernel = *config.kernel;
    const double eta = config.eta.value_or(kDefaultKernelEta);
    const bool truncated = config.kl_mode == KlMode::spectral_truncated;
    const bool nystrom = config.evaluation == KernelEvaluation::nystrom;

    const auto nystrom_fit = [&](const Dataset& data) {
        const Eigen::Index r = std::min(config.nystrom_rank, data.size());
        return NystromChristoffelEstimator::fit(data, kernel, config.sigma0_sq, r, config.landmarks);
    };

    auto step = [&](const Dataset& data) -> StepResult {
        const Eigen::Index n = data.size();
        if (n > config.gram_capacity) {
            if (!truncated || !nystrom) {
                throw CapacityError("N = " + std::to_string(n) + " exceeds the Gramian capacity " +
                                    std::to_string(config.gram_capacity) +
                                    "; set kl_mode to spectral_truncated and evaluation to nystrom");
            }
            // Risk from the posterior conditioned on the landmarks only, which
            // dominates the full-data values pointwise; KL from matrix-free
            // Lanczos.
            auto approx = nystrom_fit(data);
            PointMatrix landmark_points(static_cast<Eigen::Index>(approx.landmarks().size()), data.dim());
            for (std::size_t j = 0; j < approx.landmarks().size(); ++j) {
                landmark_points.row(static_cast<Eigen::Index>(j)) = data.matrix().row(approx.landmarks()[j]);
            }
            const auto subset = KernelChristoffelEstimator::fit(Dataset(std::move(landmark_points)), kernel,
                                                                config.sigma0_sq, config.gram_capacity);
            const Eigen::VectorXd values = subset.evaluate(data);
            const double risk =
                empirical_stochastic_risk({values.data(), static_cast<std::size_t>(values.size())}, eta);
            const auto top = conservative_top(matrix_free_top(kernel, data, std::min(config.kl_rank, n)));
            const double kl = gaussian_kl_kernel_truncated(top, n, config.sigma0_sq);
            return {risk, kl, std::move(approx)};
        }

        Eigen::MatrixXd gram = kernel.gram(data);
        std::optional<double> kl;
        if (truncated) {
            const auto top = conservative_top(linalg::top_eigenvalues(gram, std::min(config.kl_rank, n), 1e-10));
            kl = gaussian_kl_kernel_truncated(top, n, config.sigma0_sq);
        }
        auto est = KernelChristoffelEstimator::fit_from_gram(data, kernel, config.sigma0_sq, std::move(gram));
        const double ridge = config.sigma0_sq + est.jitter();
        const Eigen::VectorXd inv_diag = linalg::inverse_diagonal(est.factor());
        const Eigen::VectorXd values = (ridge * (1.0 - ridge * inv_diag.array())).max(0.0).matrix();
        const double risk = empirical_stochastic_risk({values.data(), static_cast<std::size_t>(values.size())}, eta);
        if (!kl) {
            kl = gaussian_kl_kernel_from_ridged(linalg::log_det_from_factor(est.factor()), inv_diag.sum(), n, ridge);
        }
        return {risk, *kl, std::move(est)};
    };
    auto finish = [&](const Dataset& data, std::optional<ChristoffelEstimator> fitted) -> ChristoffelEstimator {
        if (nystrom) {
            if (fitted && std::holds_alternative<NystromChristoffelEstimator>(*fitted)) return std::move(*fitted);
            fitted.reset();
            return nystrom_fit(data);
        }
        if (fitted) return std::move(*fitted);
        return KernelChristoffelEstimator::fit(data, kernel, config.sigma0_sq, config.gram_capacity);
    };
    return pacbayes_loop(source, config, CertificateMethod::pacbayes_kernel, eta, log, step, finish);
}

double clopper_pearson_lower(std::int64_t successes, std::int64_t trials, double delta) {
    if (trials < 1 || successes < 0 || successes > trials) throw ArgumentError("clopper_pearson_lower: bad counts");
    if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("clopper_pearson_lower: delta must lie in (0, 1)");
    if (successes == 0) return 0.0;
    return boost::math::ibeta_inv(static_cast<double>(successes), static_cast<double>(trials - successes + 1), delta);
}

CoverageReport validate_estimate(const SupportEstimate& estimate, const SampleSource& source,
                                 Eigen::Index n_validation, double confidence_delta, std::uint64_t stream) {
    if (n_validation < 1) throw ArgumentError("validation needs at least one sample");
    if (source.dim() != estimate.dim()) throw ArgumentError("validation source dimension does not match the estimate");
    CoverageReport report;
    report.total = n_validation;
    report.confidence_delta = confidence_delta;
    constexpr Eigen::Index chunk = 20000;
    SampleCursor cursor(source, stream);
    for (Eigen::Index done = 0; done < n_validation; done += chunk) {
        const Dataset batch = cursor.next(std::min(chunk, n_validation - done));
        const Eigen::VectorXd values = estimate.values(batch);
        report.hits += (values.array() <= estimate.threshold()).count();
    }
    report.point_estimate = static_cast<double>(report.hits) / static_cast<double>(report.total);
    report.lower_bound = clopper_pearson_lower(report.hits, report.total, confidence_delta);
    return report;
}

}  // namespace christoffel
