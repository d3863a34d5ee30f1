#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace christoffel {

/// Number of monomials of total degree <= m in n variables, C(n+m, n).
/// Throws RangeError when the result is 2^53 or larger.
std::uint64_t basis_dimension(int n, int m);

/// Monomials of total degree <= m in n variables, in graded lexicographic
/// order: constant first, then by total degree, and within a degree by
/// descending exponent of x_1, then x_2, ... For n=2, m=2 the order is
/// 1, x1, x2, x1^2, x1 x2, x2^2.
///
/// Evaluation builds each monomial from an earlier one times a single
/// coordinate, so a full evaluation costs one multiply per entry.
/// Immutable after construction.
class MultiIndexBasis {
public:
    MultiIndexBasis(int n, int m);

    int n() const noexcept { return n_; }
    int m() const noexcept { return m_; }
    Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(degrees_.size()); }

    /// Exponent tuple of monomial j.
    std::span<const int> exponents(Eigen::Index j) const;
    int degree(Eigen::Index j) const { return degrees_[static_cast<std::size_t>(j)]; }

    Eigen::VectorXd evaluate(std::span<const double> x) const;
    /// Writes z_m(x) into `out`, which must already have size().
    void evaluate_into(std::span<const double> x, Eigen::Ref<Eigen::VectorXd> out) const;

    bool operator==(const MultiIndexBasis& other) const noexcept {
        return n_ == other.n_ && m_ == other.m_;
    }

private:
    int n_;
    int m_;
    std::vector<int> exponents_;  // size() * n, row-major
    std::vector<int> degrees_;
    // For j > 0: monomial j = monomial parent_[j] * x[factor_[j]].
    std::vector<Eigen::Index> parent_;
    std::vector<int> factor_;
};

}  // namespace christoffel
