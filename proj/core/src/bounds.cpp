#include "christoffel/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "christoffel/error.hpp"
#include "christoffel/linalg.hpp"

namespace christoffel {

namespace {

void require_open_unit(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) throw ArgumentError(std::string(name) + " must lie in (0, 1)");
}

void require_ridge(double sigma0_sq) {
    if (!(sigma0_sq > 0.0) || !std::isfinite(sigma0_sq)) throw ArgumentError("sigma0_sq must be positive and finite");
}

// ln(1 + t) + 1/(1 + t) - 1, arranged to avoid cancellation for small t.
double spectral_summand(double lambda, double sigma0_sq) {
    const double t = std::max(lambda, 0.0) / sigma0_sq;
    return std::log1p(t) - t / (1.0 + t);
}

}  // namespace

std::uint64_t classical_sample_bound(double epsilon, double delta, std::uint64_t vc_dim) {
    require_open_unit(epsilon, "epsilon");
    require_open_unit(delta, "delta");
    if (vc_dim == 0) throw ArgumentError("VC dimension must be positive");
    const double rhs =
        (5.0 / epsilon) * (std::log(4.0 / delta) + static_cast<double>(vc_dim) * std::log(40.0 / epsilon));
    if (!(rhs < 9.0e15)) throw RangeError("classical sample bound exceeds the representable range");
    return static_cast<std::uint64_t>(std::ceil(rhs));
}

double chi2_cdf_1dof(double x) {
    if (std::isnan(x) || x < 0.0) throw ArgumentError("chi2_cdf_1dof: x must be >= 0");
    if (std::isinf(x)) return 1.0;
    return std::erf(std::sqrt(0.5 * x));
}

double chi2_sf_1dof(double x) {
    if (std::isnan(x) || x < 0.0) throw ArgumentError("chi2_sf_1dof: x must be >= 0");
    if (std::isinf(x)) return 0.0;
    return std::erfc(std::sqrt(0.5 * x));
}

double central_concept_factor() { return 1.0 / chi2_sf_1dof(1.0); }

double central_concept_scale(double srisk_bound) { return srisk_bound * central_concept_factor(); }

double bernoulli_kl(double q, double p) {
    if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("bernoulli_kl: q must lie in [0, 1]");
    require_open_unit(p, "bernoulli_kl: p");
    double out = 0.0;
    if (q > 0.0) out += q * std::log(q / p);
    if (q < 1.0) out += (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
    return std::max(out, 0.0);
}

double kl_inverse_upper(double q_hat, double gamma) {
    if (!(q_hat >= 0.0 && q_hat <= 1.0)) throw ArgumentError("kl_inverse_upper: q_hat must lie in [0, 1]");
    if (std::isnan(gamma) || gamma < 0.0) throw ArgumentError("kl_inverse_upper: gamma must be >= 0");
    if (gamma == 0.0 || q_hat >= 1.0) return q_hat;
    // Bisect until the bracket cannot shrink, which is well inside 1e-12.
    // Near 1 the divergence is steep, so stopping at 1e-12 would overshoot
    // gamma noticeably. The upper end is returned, never under-reporting.
    double lo = q_hat;
    double hi = 1.0;
    for (;;) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (bernoulli_kl(q_hat, mid) <= gamma) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

double empirical_stochastic_risk(std::span<const double> values, double eta) {
    if (values.empty()) throw ArgumentError("empirical_stochastic_risk: no values");
    if (!(eta > 0.0)) throw ArgumentError("empirical_stochastic_risk: eta must be positive");
    double sum = 0.0;
    for (const double v : values) {
        if (std::isnan(v) || v < 0.0) throw ArgumentError("empirical_stochastic_risk: values must be >= 0");
        if (v > 0.0) sum += chi2_sf_1dof(eta / v);
    }
    return sum / static_cast<double>(values.size());
}

double gaussian_kl_generic(const Eigen::VectorXd& mu0, const Eigen::MatrixXd& sigma0, const Eigen::VectorXd& mu1,
                           const Eigen::MatrixXd& sigma1) {
    const Eigen::Index k = mu0.size();
    if (mu1.size() != k || sigma0.rows() != k || sigma0.cols() != k || sigma1.rows() != k || sigma1.cols() != k) {
        throw ArgumentError("gaussian_kl_generic: dimension mismatch");
    }
    const Eigen::MatrixXd l0 = linalg::cholesky(sigma0, "gaussian kl: first covariance");
    const Eigen::MatrixXd l1 = linalg::cholesky(sigma1, "gaussian kl: second covariance");
    // tr(S1^-1 S0) = ||L1^-1 L0||_F^2
    const Eigen::MatrixXd w = l1.triangularView<Eigen::Lower>().solve(l0);
    const double trace = w.squaredNorm();
    const double mahalanobis = linalg::inverse_quadratic_form(l1, mu0 - mu1);
    const double value = 0.5 * (trace + mahalanobis - static_cast<double>(k) + linalg::log_det_from_factor(l1) -
                                linalg::log_det_from_factor(l0));
    return std::max(value, 0.0);
}

double gaussian_kl_kernel_dense(const Eigen::MatrixXd& gram, double sigma0_sq) {
    require_ridge(sigma0_sq);
    if (gram.rows() != gram.cols()) throw ArgumentError("gaussian_kl_kernel_dense: matrix is not square");
    const Eigen::Index n = gram.rows();
    Eigen::MatrixXd b = gram / sigma0_sq;
    b.diagonal().array() += 1.0;
    linalg::cholesky_in_place(b, "kernel kl cholesky");
    const double value = 0.5 * (linalg::log_det_from_factor(b) + linalg::inverse_diagonal(b).sum() -
                                static_cast<double>(n));
    return std::max(value, 0.0);
}

double gaussian_kl_kernel_from_ridged(double log_det_ridged, double trace_inverse_ridged, Eigen::Index n,
                                      double sigma0_sq) {
    require_ridge(sigma0_sq);
    const double nd = static_cast<double>(n);
    const double value = 0.5 * (log_det_ridged - nd * std::log(sigma0_sq) + sigma0_sq * trace_inverse_ridged - nd);
    return std::max(value, 0.0);
}

double gaussian_kl_kernel_spectral(std::span<const double> eigenvalues, double sigma0_sq) {
    require_ridge(sigma0_sq);
    double sum = 0.0;
    for (const double lambda : eigenvalues) sum += spectral_summand(lambda, sigma0_sq);
    return 0.5 * sum;
}

double gaussian_kl_kernel_truncated(std::span<const double> top_eigenvalues_desc, Eigen::Index n, double sigma0_sq) {
    require_ridge(sigma0_sq);
    const auto p = static_cast<Eigen::Index>(top_eigenvalues_desc.size());
    if (p < 1 || p > n) throw ArgumentError("gaussian_kl_kernel_truncated: need 1 <= p <= N");
    if (!std::is_sorted(top_eigenvalues_desc.begin(), top_eigenvalues_desc.end(), std::greater<>())) {
        throw ArgumentError("gaussian_kl_kernel_truncated: eigenvalues must be sorted descending");
    }
    const double tail = spectral_summand(top_eigenvalues_desc.back(), sigma0_sq);
    return gaussian_kl_kernel_spectral(top_eigenvalues_desc, sigma0_sq) + 0.5 * static_cast<double>(n - p) * tail;
}

std::string_view to_string(KlVariant variant) {
    return variant == KlVariant::moment_inverse ? "moment_inverse" : "ridged_posterior";
}

KlVariant parse_kl_variant(std::string_view text) {
    if (text == "moment_inverse") return KlVariant::moment_inverse;
    if (text == "ridged_posterior") return KlVariant::ridged_posterior;
    throw ArgumentError("unknown kl_variant '" + std::string(text) + "'");
}

double gaussian_kl_poly(const Eigen::MatrixXd& moment_factor, double sigma0_sq, KlVariant variant) {
    require_ridge(sigma0_sq);
    if (moment_factor.rows() != moment_factor.cols()) throw ArgumentError("gaussian_kl_poly: factor is not square");
    const Eigen::Index d = moment_factor.rows();
    const double dd = static_cast<double>(d);
    const Eigen::MatrixXd* factor = &moment_factor;
    Eigen::MatrixXd ridged;
    if (variant == KlVariant::ridged_posterior) {
        ridged = moment_factor.triangularView<Eigen::Lower>() * moment_factor.transpose();
        ridged.diagonal().array() += sigma0_sq;
        linalg::cholesky_in_place(ridged, "ridged posterior cholesky");
        factor = &ridged;
    } else if ((moment_factor.diagonal().array() <= 0.0).any()) {
        throw NumericError("gaussian kl poly", "factor is not positive definite");
    }
    const double value = 0.5 * (sigma0_sq * linalg::inverse_diagonal(*factor).sum() - dd +
                                linalg::log_det_from_factor(*factor) - dd * std::log(sigma0_sq));
    return std::max(value, 0.0);
}

double iteration_delta(int iteration, double delta) {
    if (iteration < 1) throw ArgumentError("iteration index must be >= 1");
    require_open_unit(delta, "delta");
    const double i = iteration;
    return 6.0 * delta / (std::numbers::pi * std::numbers::pi * i * i);
}

double pacbayes_risk_bound(double q_hat, double kl, std::int64_t n, double delta_i) {
    if (n < 1) throw ArgumentError("pacbayes_risk_bound: N must be >= 1");
    require_open_unit(delta_i, "delta_i");
    if (std::isnan(kl) || kl < 0.0) throw ArgumentError("pacbayes_risk_bound: kl must be >= 0");
    const double nd = static_cast<double>(n);
    return kl_inverse_upper(q_hat, (kl + std::log((nd + 1.0) / delta_i)) / nd);
}

double epsilon_schedule(double r_bar, std::int64_t n, int iteration, double delta) {
    if (n < 1 || iteration < 1) throw ArgumentError("epsilon_schedule: N and i must be >= 1");
    require_open_unit(delta, "delta");
    const double i = iteration;
    const double log_term = (2.0 / static_cast<double>(n)) *
                            std::log(std::numbers::pi * std::numbers::pi * i * i / (6.0 * delta));
    return (r_bar + log_term) * central_concept_factor();
}

IterationRecord make_iteration_record(int iteration, std::int64_t n, double empirical_risk, double kl, double delta) {
    IterationRecord r;
    r.iteration = iteration;
    r.n_samples = n;
    r.empirical_risk = empirical_risk;
    r.kl_divergence = kl;
    r.delta_i = iteration_delta(iteration, delta);
    const double nd = static_cast<double>(n);
    r.gamma = (kl + std::log((nd + 1.0) / r.delta_i)) / nd;
    r.risk_bound = kl_inverse_upper(empirical_risk, r.gamma);
    const double i = iteration;
    r.log_term = (2.0 / nd) * std::log(std::numbers::pi * std::numbers::pi * i * i / (6.0 * delta));
    r.epsilon = epsilon_schedule(r.risk_bound, n, iteration, delta);
    return r;
}

}  // namespace christoffel
