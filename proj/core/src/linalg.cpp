#include "christoffel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "christoffel/error.hpp"

namespace christoffel::linalg {

double cholesky_in_place(Eigen::Ref<Eigen::MatrixXd> a, std::string_view stage) {
    if (a.rows() != a.cols()) throw ArgumentError(std::string(stage) + ": matrix is not square");
    if (!a.allFinite()) throw NumericError(std::string(stage), "matrix has non-finite entries");
    const Eigen::Index d = a.rows();
    // LLT<Ref> overwrites only the lower triangle; the diagonal copy plus the
    // untouched upper triangle let us rebuild the input for a retry.
    const Eigen::VectorXd diagonal = a.diagonal();
    double jitter = 0.0;
    {
        Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(a);
        if (llt.info() == Eigen::Success) {
            a.triangularView<Eigen::StrictlyUpper>().setZero();
            return 0.0;
        }
    }
    jitter = 1e-10 * diagonal.sum() / static_cast<double>(d);
    if (!(jitter > 0.0)) jitter = 1e-10;
    a.triangularView<Eigen::StrictlyLower>() = a.transpose().triangularView<Eigen::StrictlyLower>();
    a.diagonal() = diagonal.array() + jitter;
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> retry(a);
    if (retry.info() != Eigen::Success) {
        throw NumericError(std::string(stage), "matrix is not positive definite (jittered retry failed)");
    }
    a.triangularView<Eigen::StrictlyUpper>().setZero();
    return jitter;
}

Eigen::MatrixXd cholesky(const Eigen::MatrixXd& a, std::string_view stage, double* jitter) {
    Eigen::MatrixXd l = a;
    const double j = cholesky_in_place(l, stage);
    if (jitter != nullptr) *jitter = j;
    return l;
}

double log_det_from_factor(const Eigen::MatrixXd& lower) {
    return 2.0 * lower.diagonal().array().log().sum();
}

double inverse_quadratic_form(const Eigen::MatrixXd& lower, const Eigen::VectorXd& v) {
    return lower.triangularView<Eigen::Lower>().solve(v).squaredNorm();
}

Eigen::VectorXd inverse_diagonal(const Eigen::MatrixXd& lower, Eigen::Index block) {
    const Eigen::Index n = lower.rows();
    Eigen::VectorXd out(n);
    for (Eigen::Index j0 = 0; j0 < n; j0 += block) {
        const Eigen::Index bs = std::min(block, n - j0);
        const Eigen::Index tail = n - j0;
        // Column j of L^{-1} is zero above row j, so only the trailing block matters.
        Eigen::MatrixXd y = Eigen::MatrixXd::Zero(tail, bs);
        y.topRows(bs).setIdentity();
        lower.bottomRightCorner(tail, tail).triangularView<Eigen::Lower>().solveInPlace(y);
        out.segment(j0, bs) = y.colwise().squaredNorm().transpose();
    }
    return out;
}

namespace {

Eigen::VectorXd random_unit(Eigen::Index n, std::mt19937_64& rng) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
    }
    return v / v.norm();
}

}  // namespace

TopEigenvalues top_eigenvalues(const SymmetricOperator& op, Eigen::Index n, Eigen::Index count, double rel_tol,
                               std::uint64_t seed) {
    if (n < 1 || count < 1) throw ArgumentError("top_eigenvalues: need n >= 1 and count >= 1");
    count = std::min(count, n);
    const Eigen::Index max_steps = std::min(n, 3 * count + 100);

    std::mt19937_64 rng(seed);
    Eigen::MatrixXd basis(n, max_steps);
    std::vector<double> alpha;
    std::vector<double> beta;
    alpha.reserve(static_cast<std::size_t>(max_steps));
    beta.reserve(static_cast<std::size_t>(max_steps));

    Eigen::VectorXd q = random_unit(n, rng);
    Eigen::VectorXd w(n);
    TopEigenvalues result;
    double scale = 0.0;

    for (Eigen::Index j = 0; j < max_steps; ++j) {
        basis.col(j) = q;
        op(q, w);
        const double a = q.dot(w);
        alpha.push_back(a);
        w -= a * q;
        if (j > 0) w -= beta.back() * basis.col(j - 1);
        for (int pass = 0; pass < 2; ++pass) {
            const auto qk = basis.leftCols(j + 1);
            w -= qk * (qk.transpose() * w);
        }
        double b = w.norm();
        scale = std::max(scale, std::abs(a) + b);
        const Eigen::Index k = j + 1;
        const bool breakdown = b <= 1e-13 * std::max(scale, 1e-300);
        const bool check = k == max_steps || breakdown || (k >= count && (k - count) % 25 == 0);

        if (check) {
            Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), k);
            Eigen::VectorXd sub = k > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(beta.data(), k - 1))
                                        : Eigen::VectorXd(0);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
            tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
            const Eigen::VectorXd& theta = tri.eigenvalues();  // ascending
            const Eigen::Index take = std::min(count, k);
            const double top = std::max(theta[k - 1], 0.0);
            bool ok = true;
            result.values.assign(static_cast<std::size_t>(take), 0.0);
            result.residuals.assign(static_cast<std::size_t>(take), 0.0);
            for (Eigen::Index i = 0; i < take; ++i) {
                const Eigen::Index idx = k - 1 - i;
                const double residual = breakdown ? 0.0 : std::abs(b * tri.eigenvectors()(k - 1, idx));
                result.values[static_cast<std::size_t>(i)] = theta[idx];
                result.residuals[static_cast<std::size_t>(i)] = residual;
                if (residual > rel_tol * std::max(top, 1e-300)) ok = false;
            }
            result.steps = k;
            const bool complete = take == count && ok;
            if (complete || k == n) {
                result.converged = take == count && (ok || k == n);
                return result;
            }
            if (k == max_steps) {
                result.converged = false;
                return result;
            }
        }
        if (breakdown) {
            // Invariant subspace found; continue from a fresh orthogonal direction.
            Eigen::VectorXd fresh = random_unit(n, rng);
            for (int pass = 0; pass < 2; ++pass) {
                const auto qk = basis.leftCols(k);
                fresh -= qk * (qk.transpose() * fresh);
            }
            q = fresh / fresh.norm();
            beta.push_back(0.0);
        } else {
            q = w / b;
            beta.push_back(b);
        }
    }
    return result;
}

TopEigenvalues top_eigenvalues(const Eigen::MatrixXd& a, Eigen::Index count, double rel_tol) {
    if (a.rows() != a.cols()) throw ArgumentError("top_eigenvalues: matrix is not square");
    const Eigen::Index n = a.rows();
    if (count >= n || n <= 64) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) throw NumericError("symmetric eigensolve", "did not converge");
        TopEigenvalues out;
        const Eigen::Index take = std::min(count, n);
        for (Eigen::Index i = 0; i < take; ++i) {
            out.values.push_back(solver.eigenvalues()[n - 1 - i]);
            out.residuals.push_back(0.0);
        }
        out.steps = n;
        out.converged = true;
        return out;
    }
    return top_eigenvalues(
        [&a](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y.noalias() = a.selfadjointView<Eigen::Lower>() * x; }, n,
        count, rel_tol);
}

}  // namespace christoffel::linalg
