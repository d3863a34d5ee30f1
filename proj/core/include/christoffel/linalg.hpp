#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace christoffel::linalg {

/// Cholesky factorization in place. `a` must hold a full symmetric matrix;
/// on return its lower triangle is L (a = L L^T) and the strict upper
/// triangle is zero. If the first attempt fails, the factorization is
/// retried once with 1e-10 * trace / d added to the diagonal. Returns the
/// jitter that was added (0 on first-try success). Throws NumericError
/// tagged with `stage` on non-finite input or a second failure.
double cholesky_in_place(Eigen::Ref<Eigen::MatrixXd> a, std::string_view stage);

/// Same as cholesky_in_place on a copy.
Eigen::MatrixXd cholesky(const Eigen::MatrixXd& a, std::string_view stage, double* jitter = nullptr);

/// log det(L L^T) for a lower-triangular factor.
double log_det_from_factor(const Eigen::MatrixXd& lower);

/// ||L^{-1} v||^2, i.e. v^T (L L^T)^{-1} v.
double inverse_quadratic_form(const Eigen::MatrixXd& lower, const Eigen::VectorXd& v);

/// diag((L L^T)^{-1}) via blocked forward substitution, O(n^3 / 3) work and
/// O(n * block) extra memory.
Eigen::VectorXd inverse_diagonal(const Eigen::MatrixXd& lower, Eigen::Index block = 256);

/// y = A x for a symmetric operator.
using SymmetricOperator = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

struct TopEigenvalues {
    std::vector<double> values;     // descending
    std::vector<double> residuals;  // Ritz residual norm for each value
    Eigen::Index steps = 0;
    bool converged = false;
};

/// Largest `count` eigenvalues of a symmetric positive semidefinite operator
/// of size n by Lanczos with full reorthogonalization. Stops once every
/// requested Ritz pair has residual <= rel_tol * (largest Ritz value), or
/// after min(n, 3 * count + 100) steps. When count >= n the full spectrum is
/// returned.
TopEigenvalues top_eigenvalues(const SymmetricOperator& op, Eigen::Index n, Eigen::Index count,
                               double rel_tol = 1e-10, std::uint64_t seed = 0x9e3779b97f4a7c15ULL);

/// Convenience overload for an explicit symmetric matrix (lower triangle read).
TopEigenvalues top_eigenvalues(const Eigen::MatrixXd& a, Eigen::Index count, double rel_tol = 1e-10);

}  // namespace christoffel::linalg
