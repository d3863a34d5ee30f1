#include <christoffel/algorithms.hpp>
#include <christoffel/bounds.hpp>
#include <christoffel/error.hpp>
#include <christoffel/random.hpp>
#include <christoffel/sampling.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace christoffel;

namespace {

FunctionSource box_source(std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    return FunctionSource(2, seed, [lo, hi](std::mt19937_64& g, std::span<double> out) {
        for (double& v : out) v = lo + (hi - lo) * uniform01(g);
    });
}

FunctionSource point_source(double x, double y) {
    return FunctionSource(2, 0, [x, y](std::mt19937_64&, std::span<double> out) {
        out[0] = x;
        out[1] = y;
    });
}

AlgorithmConfig poly_config() {
    AlgorithmConfig c;
    c.epsilon = 0.4;
    c.delta = 1e-3;
    c.sigma0_sq = 1e-3;
    c.degree = 2;
    c.initial_samples = 200;
    c.batch_size = 200;
    return c;
}

AlgorithmConfig kernel_config() {
    AlgorithmConfig c;
    c.epsilon = 0.01;
    c.delta = 1e-3;
    c.sigma0_sq = 0.1;
    c.kernel = KernelSpec::squared_exponential(0.5);
    c.initial_samples = 100;
    c.batch_size = 100;
    c.max_iterations = 3;
    return c;
}

// P(X >= k) for X ~ Binomial(n, p), by direct summation in log space.
double upper_tail(std::int64_t k, std::int64_t n, double p) {
    double total = 0.0;
    for (std::int64_t j = k; j <= n; ++j) {
        const double log_term = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) +
                                j * std::log(p) + (n - j) * std::log1p(-p);
        total += std::exp(log_term);
    }
    return total;
}

}  // namespace

TEST(AlgorithmConfig, ValidatesRanges) {
    auto c = poly_config();
    EXPECT_NO_THROW(c.validate());
    c.epsilon = 0.0;
    EXPECT_THROW(c.validate(), ArgumentError);
    c = poly_config();
    c.delta = 1.0;
    EXPECT_THROW(c.validate(), ArgumentError);
    c = poly_config();
    c.sigma0_sq = -1.0;
    EXPECT_THROW(c.validate(), ArgumentError);
    c = poly_config();
    c.batch_size = 0;
    EXPECT_THROW(c.validate(), ArgumentError);
    EXPECT_DOUBLE_EQ(default_poly_eta(2, 10, 0.1), 2310.0);
    EXPECT_EQ(parse_kl_mode(to_string(KlMode::spectral_truncated)), KlMode::spectral_truncated);
    EXPECT_EQ(parse_kernel_evaluation(to_string(KernelEvaluation::nystrom)), KernelEvaluation::nystrom);
    EXPECT_THROW(parse_kl_mode("sparse"), ArgumentError);
}

TEST(Algorithm1, ClassicalSampleCountAndZeroTrainingRisk) {
    const auto source = box_source(1);
    auto c = poly_config();
    c.epsilon = 0.5;
    c.delta = 0.1;
    const auto result = algorithm1(source, c);
    const std::uint64_t expected = classical_sample_bound(0.5, 0.1, 15);
    EXPECT_EQ(static_cast<std::uint64_t>(result.samples.size()), expected);
    const auto& cert = *result.estimate.certificate();
    EXPECT_EQ(cert.method, CertificateMethod::classical);
    EXPECT_EQ(cert.n_samples, static_cast<std::int64_t>(expected));
    EXPECT_EQ(cert.vc_dimension, 15u);
    EXPECT_TRUE(cert.trace.empty());
    EXPECT_DOUBLE_EQ(cert.achieved_epsilon(), 0.5);

    double max_value = 0.0;
    for (Eigen::Index i = 0; i < result.samples.size(); ++i) {
        EXPECT_TRUE(membership(result.estimate, result.samples.point(i)));
        max_value = std::max(max_value, result.estimate.value(result.samples.point(i)));
    }
    EXPECT_EQ(max_value, result.estimate.threshold());
}

TEST(Algorithm1, BasisGuard) {
    const auto source = box_source(1);
    auto c = poly_config();
    c.degree = 30;
    c.max_basis_dimension = 100;
    EXPECT_THROW(algorithm1(source, c), CapacityError);
}

TEST(Algorithm3, AnytimeTraceIsConsistentAndReproducible) {
    const auto source = box_source(2);
    const auto c = poly_config();
    const auto result = algorithm3(source, c);
    const auto& cert = *result.estimate.certificate();
    ASSERT_FALSE(cert.trace.empty());
    EXPECT_EQ(cert.status, CertificateStatus::certified);
    EXPECT_EQ(cert.method, CertificateMethod::pacbayes_poly);
    EXPECT_LE(cert.trace.back().epsilon, c.epsilon);
    EXPECT_DOUBLE_EQ(result.estimate.threshold(), default_poly_eta(2, 2, 0.4));
    for (std::size_t k = 0; k < cert.trace.size(); ++k) {
        const auto& r = cert.trace[k];
        EXPECT_EQ(r.iteration, static_cast<int>(k) + 1);
        EXPECT_EQ(r.n_samples, c.initial_samples + r.iteration * c.batch_size);
        EXPECT_TRUE(record_is_consistent(r, c.delta));
        EXPECT_GE(r.risk_bound, r.empirical_risk);
        if (k + 1 < cert.trace.size()) EXPECT_GT(r.epsilon, c.epsilon);

        // recompute the record from the first N_i samples
        const Dataset prefix = result.samples.head(r.n_samples);
        const auto est = PolyChristoffelEstimator::fit(prefix, MultiIndexBasis(2, 2), c.sigma0_sq);
        const Eigen::VectorXd v = est.evaluate(prefix);
        const double risk = empirical_stochastic_risk({v.data(), static_cast<std::size_t>(v.size())},
                                                      result.estimate.threshold());
        EXPECT_EQ(risk, r.empirical_risk);
        EXPECT_EQ(gaussian_kl_poly(est.factor(), c.sigma0_sq), r.kl_divergence);
    }
    EXPECT_EQ(cert.n_samples, result.samples.size());

    const auto again = algorithm3(source, c);
    EXPECT_EQ(*again.estimate.certificate(), cert);
    EXPECT_EQ(again.samples.matrix(), result.samples.matrix());
    EXPECT_EQ(std::get<PolyChristoffelEstimator>(again.estimate.estimator()).factor(),
              std::get<PolyChristoffelEstimator>(result.estimate.estimator()).factor());
}

TEST(Algorithm3, EpsilonOneNeverEntersLoop) {
    const auto source = box_source(3);
    auto c = poly_config();
    c.epsilon = 1.0;
    const auto result = algorithm3(source, c);
    const auto& cert = *result.estimate.certificate();
    EXPECT_TRUE(cert.trace.empty());
    EXPECT_EQ(cert.n_samples, c.initial_samples);
    EXPECT_EQ(result.samples.size(), c.initial_samples);
    EXPECT_EQ(cert.status, CertificateStatus::certified);
    EXPECT_DOUBLE_EQ(cert.achieved_epsilon(), 1.0);
}

TEST(Algorithm3, BudgetExhaustionIsAStatus) {
    const auto source = box_source(4);
    auto c = poly_config();
    c.epsilon = 0.01;
    c.max_iterations = 2;
    auto result = algorithm3(source, c);
    EXPECT_EQ(result.estimate.certificate()->status, CertificateStatus::not_terminated);
    EXPECT_EQ(result.estimate.certificate()->trace.size(), 2u);
    EXPECT_EQ(result.samples.size(), 600);

    c.max_iterations = 200;
    c.max_samples = 800;
    result = algorithm3(source, c);
    EXPECT_EQ(result.estimate.certificate()->status, CertificateStatus::not_terminated);
    EXPECT_EQ(result.samples.size(), 800);
    EXPECT_EQ(result.estimate.certificate()->trace.size(), 3u);
}

TEST(Algorithm3, InputMapKeepsSamplesInOriginalCoordinates) {
    const auto source = box_source(5, 10.0, 14.0);
    auto c = poly_config();
    c.input_map = AffineInputMap{Eigen::Vector2d(12.0, 12.0), Eigen::Vector2d(2.0, 2.0)};
    const auto result = algorithm3(source, c);
    EXPECT_GE(result.samples.matrix().minCoeff(), 10.0);
    const auto& est = std::get<PolyChristoffelEstimator>(result.estimate.estimator());
    const auto x = result.samples.point(0);
    const Eigen::VectorXd mapped = c.input_map->apply(x);
    EXPECT_EQ(result.estimate.value(x), est(std::span<const double>(mapped.data(), 2)));

    auto bad = c;
    bad.input_map = AffineInputMap::identity(3);
    EXPECT_THROW(algorithm3(source, bad), ArgumentError);
}

TEST(Algorithm2, PointSourceHasNearZeroRiskAndShrinkingEpsilon) {
    const auto source = point_source(0.3, -0.2);
    auto c = kernel_config();
    c.max_iterations = 5;
    c.epsilon = 1e-6;
    c.initial_samples = 20;
    c.batch_size = 20;
    const auto result = algorithm2(source, c);
    const auto& trace = result.estimate.certificate()->trace;
    ASSERT_EQ(trace.size(), 5u);
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double n = static_cast<double>(trace[k].n_samples);
        // duplicated points: K = 1 1^T, training value s / (s + N) up to jitter
        const double value = c.sigma0_sq / (c.sigma0_sq + n);
        EXPECT_NEAR(trace[k].empirical_risk, chi2_sf_1dof(0.15 / value), 1e-12);
        EXPECT_LT(trace[k].empirical_risk, 1e-6);
        if (k > 0) EXPECT_LT(trace[k].epsilon, trace[k - 1].epsilon);
    }
}

TEST(Algorithm2, TruncatedKlIsConservative) {
    const auto source = box_source(6);
    auto dense = kernel_config();
    auto truncated = dense;
    truncated.kl_mode = KlMode::spectral_truncated;
    truncated.kl_rank = 8;
    const auto a = algorithm2(source, dense);
    const auto b = algorithm2(source, truncated);
    const auto& ta = a.estimate.certificate()->trace;
    const auto& tb = b.estimate.certificate()->trace;
    ASSERT_EQ(ta.size(), tb.size());
    for (std::size_t k = 0; k < ta.size(); ++k) {
        EXPECT_EQ(ta[k].empirical_risk, tb[k].empirical_risk);
        EXPECT_GE(tb[k].kl_divergence, ta[k].kl_divergence * (1 - 1e-12));
        EXPECT_GE(tb[k].epsilon, ta[k].epsilon * (1 - 1e-12));
        EXPECT_TRUE(record_is_consistent(tb[k], dense.delta));
    }
    // exact evaluation returns the estimator the last record was computed from
    const auto& est = std::get<KernelChristoffelEstimator>(a.estimate.estimator());
    EXPECT_EQ(est.n_samples(), a.samples.size());
}

TEST(Algorithm2, CapacityRequiresTruncatedNystrom) {
    const auto source = box_source(7);
    auto c = kernel_config();
    c.gram_capacity = 150;
    EXPECT_THROW(algorithm2(source, c), CapacityError);
    c.kl_mode = KlMode::spectral_truncated;
    EXPECT_THROW(algorithm2(source, c), CapacityError);
    c.evaluation = KernelEvaluation::nystrom;
    c.kl_rank = 20;
    c.nystrom_rank = 60;
    const auto over = algorithm2(source, c);
    EXPECT_TRUE(std::holds_alternative<NystromChristoffelEstimator>(over.estimate.estimator()));

    // Same data within capacity: the over-capacity risk is never smaller.
    c.gram_capacity = 10000;
    const auto exact = algorithm2(source, c);
    const auto& to = over.estimate.certificate()->trace;
    const auto& te = exact.estimate.certificate()->trace;
    ASSERT_EQ(to.size(), te.size());
    for (std::size_t k = 0; k < to.size(); ++k) {
        EXPECT_GE(to[k].empirical_risk, te[k].empirical_risk);
        EXPECT_NEAR(to[k].kl_divergence, te[k].kl_divergence, 1e-6 * te[k].kl_divergence);
    }
    // Nystrom evaluation contains the exact set
    const auto exact_kernel = KernelChristoffelEstimator::fit(exact.samples, *c.kernel, c.sigma0_sq);
    for (Eigen::Index i = 0; i < 200; ++i) {
        const auto x = exact.samples.point(i);
        EXPECT_LE(exact.estimate.value(x), exact_kernel(x) + 1e-8);
    }
}

TEST(Algorithm2, RequiresKernel) {
    auto c = kernel_config();
    c.kernel.reset();
    EXPECT_THROW(algorithm2(box_source(1), c), ArgumentError);
}

TEST(ClopperPearson, MatchesBinomialTailOracle) {
    EXPECT_EQ(clopper_pearson_lower(0, 50, 0.01), 0.0);
    EXPECT_NEAR(clopper_pearson_lower(100, 100, 0.01), std::pow(0.01, 1.0 / 100), 1e-12);
    for (std::int64_t n : {10, 57, 200}) {
        for (std::int64_t k = 1; k <= n; k += std::max<std::int64_t>(1, n / 7)) {
            for (double delta : {0.01, 0.05, 0.3}) {
                const double p = clopper_pearson_lower(k, n, delta);
                EXPECT_NEAR(upper_tail(k, n, p), delta, 1e-9) << k << "/" << n;
                EXPECT_LE(p, static_cast<double>(k) / n);
            }
        }
    }
    EXPECT_THROW(clopper_pearson_lower(5, 4, 0.1), ArgumentError);
}

TEST(ValidateEstimate, WholeSpaceAndEmptySet) {
    const auto source = box_source(8);
    const auto data = source.draw(kTrainingStream, 0, 50);
    const auto est = KernelChristoffelEstimator::fit(data, KernelSpec::squared_exponential(0.3), 0.1);

    const SupportEstimate everything(est, std::numeric_limits<double>::infinity());
    const auto full = validate_estimate(everything, source, 1000);
    EXPECT_EQ(full.hits, 1000);
    EXPECT_EQ(full.point_estimate, 1.0);
    EXPECT_NEAR(full.lower_bound, std::pow(0.01, 1e-3), 1e-12);

    const SupportEstimate empty(est, 0.0);
    const auto none = validate_estimate(empty, source, 1000);
    EXPECT_EQ(none.hits, 0);
    EXPECT_EQ(none.lower_bound, 0.0);

    EXPECT_THROW(validate_estimate(everything, source, 0), ArgumentError);
    const FunctionSource wrong(3, 1, [](std::mt19937_64&, std::span<double> out) {
        for (double& v : out) v = 0.0;
    });
    EXPECT_THROW(validate_estimate(everything, wrong, 10), ArgumentError);
}

TEST(ValidateEstimate, UsesFreshStream) {
    const auto source = box_source(9);
    const auto result = algorithm3(source, poly_config());
    const auto a = validate_estimate(result.estimate, source, 3000);
    const auto b = validate_estimate(result.estimate, source, 3000);
    EXPECT_EQ(a.hits, b.hits);
    EXPECT_GE(a.point_estimate, 1.0 - poly_config().epsilon);
}
