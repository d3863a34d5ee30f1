#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include <Eigen/Core>

#include "christoffel/certificate.hpp"

namespace christoffel {

/// Smallest N with N >= (5/eps) (ln(4/delta) + vc_dim ln(40/eps)).
std::uint64_t classical_sample_bound(double epsilon, double delta, std::uint64_t vc_dim);

/// Chi-square CDF with one degree of freedom, erf(sqrt(x/2)).
double chi2_cdf_1dof(double x);
/// 1 - chi2_cdf_1dof(x), computed with erfc so small tails keep precision.
double chi2_sf_1dof(double x);

/// 1 / (1 - F1(1)), about 3.1515.
double central_concept_factor();
double central_concept_scale(double srisk_bound);

/// D_ber(q || p) in nats with 0 log 0 = 0. Requires 0 < p < 1.
double bernoulli_kl(double q, double p);

/// sup{b in [q, 1) : D_ber(q || b) <= gamma} by bisection down to adjacent
/// doubles, returning the upper end of the final bracket. Returns 1 when the
/// supremum is within one ulp of 1.
double kl_inverse_upper(double q_hat, double gamma);

/// Mean of 1 - F1(eta / v) over the values; a zero value contributes 0.
double empirical_stochastic_risk(std::span<const double> values, double eta);

/// KL(N(mu0, sigma0) || N(mu1, sigma1)).
double gaussian_kl_generic(const Eigen::VectorXd& mu0, const Eigen::MatrixXd& sigma0, const Eigen::VectorXd& mu1,
                           const Eigen::MatrixXd& sigma1);

/// 1/2 [logdet(I + K/s) + tr((I + K/s)^-1) - N], with s = sigma0_sq.
double gaussian_kl_kernel_dense(const Eigen::MatrixXd& gram, double sigma0_sq);

/// The same quantity from a factor L of A = s I + K that is already at hand:
/// logdet(I + K/s) = logdet A - N ln s and tr((I + K/s)^-1) = s tr(A^-1).
double gaussian_kl_kernel_from_ridged(double log_det_ridged, double trace_inverse_ridged, Eigen::Index n,
                                      double sigma0_sq);

/// 1/2 sum [ln(1 + l/s) + 1/(1 + l/s) - 1]; negative eigenvalues are clamped to 0.
double gaussian_kl_kernel_spectral(std::span<const double> eigenvalues, double sigma0_sq);

/// Spectral KL with the N - p unknown eigenvalues replaced by the smallest
/// known one. An upper bound because the summand is nondecreasing.
double gaussian_kl_kernel_truncated(std::span<const double> top_eigenvalues_desc, Eigen::Index n, double sigma0_sq);

/// Posterior covariance for the polynomial weight-space KL.
///   moment_inverse:   N(0, M^-1)          against prior N(0, I/s)
///   ridged_posterior: N(0, (s I + M)^-1)  against prior N(0, I/s)
enum class KlVariant { moment_inverse, ridged_posterior };

std::string_view to_string(KlVariant variant);
KlVariant parse_kl_variant(std::string_view text);

/// Weight-space KL from a lower Cholesky factor of M. O(d^3).
double gaussian_kl_poly(const Eigen::MatrixXd& moment_factor, double sigma0_sq,
                        KlVariant variant = KlVariant::moment_inverse);

/// 6 delta / (pi^2 i^2); sums to delta over i >= 1.
double iteration_delta(int iteration, double delta);

/// kl_inverse_upper(q_hat, (kl + ln((N+1)/delta_i)) / N).
double pacbayes_risk_bound(double q_hat, double kl, std::int64_t n, double delta_i);

/// (r_bar + (2/N) ln(pi^2 i^2 / (6 delta))) / (1 - F1(1)).
double epsilon_schedule(double r_bar, std::int64_t n, int iteration, double delta);

/// Assembles a full audit record for iteration i.
IterationRecord make_iteration_record(int iteration, std::int64_t n, double empirical_risk, double kl, double delta);

}  // namespace christoffel
