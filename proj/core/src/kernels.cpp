#include "christoffel/kernels.hpp"

#include <cmath>

#include "christoffel/error.hpp"

namespace christoffel {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double squared_distance(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

Eigen::MatrixXd features(const MultiIndexBasis& basis, const Dataset& data) {
    Eigen::MatrixXd z(basis.size(), data.size());
    for (Eigen::Index i = 0; i < data.size(); ++i) basis.evaluate_into(data.point(i), z.col(i));
    return z;
}

}  // namespace

KernelSpec KernelSpec::squared_exponential(double lengthscale) {
    if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
        throw ArgumentError("squared exponential kernel: lengthscale must be positive and finite");
    }
    return KernelSpec(SquaredExponential{lengthscale});
}

KernelSpec KernelSpec::polynomial(MultiIndexBasis basis) { return KernelSpec(PolynomialInner{std::move(basis)}); }

std::string KernelSpec::name() const {
    return std::visit(overloaded{[](const SquaredExponential&) { return std::string("squared_exponential"); },
                                 [](const PolynomialInner&) { return std::string("polynomial"); }},
                      kind_);
}

double KernelSpec::operator()(std::span<const double> x, std::span<const double> y) const {
    if (x.size() != y.size()) throw ArgumentError("kernel: argument dimensions differ");
    return std::visit(overloaded{[&](const SquaredExponential& se) {
                                     const double l2 = se.lengthscale * se.lengthscale;
                                     return std::exp(-squared_distance(x, y) / (2.0 * l2));
                                 },
                                 [&](const PolynomialInner& p) {
                                     return p.basis.evaluate(x).dot(p.basis.evaluate(y));
                                 }},
                      kind_);
}

double KernelSpec::diagonal(std::span<const double> x) const {
    return std::visit(overloaded{[](const SquaredExponential&) { return 1.0; },
                                 [&](const PolynomialInner& p) { return p.basis.evaluate(x).squaredNorm(); }},
                      kind_);
}

Eigen::MatrixXd KernelSpec::gram(const Dataset& data) const {
    const Eigen::Index n = data.size();
    return std::visit(overloaded{[&](const SquaredExponential& se) {
                                     Eigen::MatrixXd k(n, n);
                                     const double scale = -1.0 / (2.0 * se.lengthscale * se.lengthscale);
                                     for (Eigen::Index j = 0; j < n; ++j) {
                                         k(j, j) = 1.0;
                                         const auto xj = data.point(j);
                                         for (Eigen::Index i = j + 1; i < n; ++i) {
                                             const double v = std::exp(scale * squared_distance(data.point(i), xj));
                                             k(i, j) = v;
                                             k(j, i) = v;
                                         }
                                     }
                                     return k;
                                 },
                                 [&](const PolynomialInner& p) {
                                     const Eigen::MatrixXd z = features(p.basis, data);
                                     Eigen::MatrixXd k = z.transpose() * z;
                                     return k;
                                 }},
                      kind_);
}

Eigen::MatrixXd KernelSpec::cross(const Dataset& a, const Dataset& b) const {
    if (a.dim() != b.dim()) throw ArgumentError("kernel cross: dataset dimensions differ");
    return std::visit(overloaded{[&](const SquaredExponential& se) {
                                     Eigen::MatrixXd c(a.size(), b.size());
                                     const double scale = -1.0 / (2.0 * se.lengthscale * se.lengthscale);
                                     for (Eigen::Index j = 0; j < b.size(); ++j) {
                                         const auto bj = b.point(j);
                                         for (Eigen::Index i = 0; i < a.size(); ++i) {
                                             c(i, j) = std::exp(scale * squared_distance(a.point(i), bj));
                                         }
                                     }
                                     return c;
                                 },
                                 [&](const PolynomialInner& p) {
                                     Eigen::MatrixXd c = features(p.basis, a).transpose() * features(p.basis, b);
                                     return c;
                                 }},
                      kind_);
}

Eigen::VectorXd KernelSpec::column(const Dataset& data, std::span<const double> x) const {
    if (static_cast<int>(x.size()) != data.dim()) {
        throw ArgumentError("kernel: query dimension " + std::to_string(x.size()) + " does not match data dimension " +
                            std::to_string(data.dim()));
    }
    Eigen::VectorXd out(data.size());
    std::visit(overloaded{[&](const SquaredExponential& se) {
                              const double scale = -1.0 / (2.0 * se.lengthscale * se.lengthscale);
                              for (Eigen::Index i = 0; i < data.size(); ++i) {
                                  out[i] = std::exp(scale * squared_distance(data.point(i), x));
                              }
                          },
                          [&](const PolynomialInner& p) {
                              const Eigen::VectorXd zx = p.basis.evaluate(x);
                              Eigen::VectorXd zi(p.basis.size());
                              for (Eigen::Index i = 0; i < data.size(); ++i) {
                                  p.basis.evaluate_into(data.point(i), zi);
                                  out[i] = zi.dot(zx);
                              }
                          }},
               kind_);
    return out;
}

}  // namespace christoffel
