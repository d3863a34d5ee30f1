#pragma once

#include <span>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "christoffel/dataset.hpp"
#include "christoffel/polybasis.hpp"

namespace christoffel {

/// k(x, y) = exp(-||x - y||^2 / (2 l^2)).
struct SquaredExponential {
    double lengthscale;
};

/// k(x, y) = z_m(x)^T z_m(y).
struct PolynomialInner {
    MultiIndexBasis basis;
};

class KernelSpec {
public:
    using Kind = std::variant<SquaredExponential, PolynomialInner>;

    static KernelSpec squared_exponential(double lengthscale);
    static KernelSpec polynomial(MultiIndexBasis basis);

    const Kind& kind() const noexcept { return kind_; }
    std::string name() const;

    double operator()(std::span<const double> x, std::span<const double> y) const;
    double diagonal(std::span<const double> x) const;

    /// Gramian K_ij = k(x_i, x_j); both triangles filled.
    Eigen::MatrixXd gram(const Dataset& data) const;
    /// Cross matrix C_ij = k(a_i, b_j).
    Eigen::MatrixXd cross(const Dataset& a, const Dataset& b) const;
    /// k_D(x): (k_D(x))_i = k(x_i, x).
    Eigen::VectorXd column(const Dataset& data, std::span<const double> x) const;

private:
    explicit KernelSpec(Kind kind) : kind_(std::move(kind)) {}
    Kind kind_;
};

}  // namespace christoffel
