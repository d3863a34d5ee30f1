#include "christoffel/polybasis.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "christoffel/error.hpp"

namespace christoffel {

std::uint64_t basis_dimension(int n, int m) {
    if (n < 1 || m < 0) {
        throw ArgumentError("basis_dimension: need n >= 1 and m >= 0, got n=" + std::to_string(n) +
                            ", m=" + std::to_string(m));
    }
    constexpr std::uint64_t limit = std::uint64_t{1} << 53;
    const std::uint64_t top = static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(m);
    const std::uint64_t k = static_cast<std::uint64_t>(std::min(n, m));
    std::uint64_t result = 1;
    // C(top-k+i, i) is integral at every step. Dividing out gcd(result, i)
    // first leaves an exact product that cannot exceed 2^64 unchecked.
    for (std::uint64_t i = 1; i <= k; ++i) {
        const std::uint64_t g = std::gcd(result, i);
        const std::uint64_t factor = (top - k + i) / (i / g);
        const std::uint64_t reduced = result / g;
        if (reduced > (limit - 1) / factor) {
            throw RangeError("basis_dimension: C(" + std::to_string(n + static_cast<long long>(m)) +
                             ", " + std::to_string(n) + ") exceeds 2^53");
        }
        result = reduced * factor;
    }
    return result;
}

namespace {

void append_degree(int n, int remaining, std::vector<int>& prefix, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(prefix.size()) == n - 1) {
        prefix.push_back(remaining);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        prefix.push_back(e);
        append_degree(n, remaining - e, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

MultiIndexBasis::MultiIndexBasis(int n, int m) : n_(n), m_(m) {
    const auto count = basis_dimension(n, m);
    std::vector<std::vector<int>> tuples;
    tuples.reserve(count);
    for (int deg = 0; deg <= m; ++deg) {
        std::vector<int> prefix;
        append_degree(n, deg, prefix, tuples);
    }

    std::map<std::vector<int>, Eigen::Index> index;
    exponents_.reserve(tuples.size() * static_cast<std::size_t>(n));
    degrees_.reserve(tuples.size());
    parent_.assign(tuples.size(), 0);
    factor_.assign(tuples.size(), 0);
    for (std::size_t j = 0; j < tuples.size(); ++j) {
        const auto& t = tuples[j];
        exponents_.insert(exponents_.end(), t.begin(), t.end());
        int deg = 0;
        for (int e : t) deg += e;
        degrees_.push_back(deg);
        index.emplace(t, static_cast<Eigen::Index>(j));
        if (j == 0) continue;
        const auto first = static_cast<int>(std::find_if(t.begin(), t.end(), [](int e) { return e > 0; }) - t.begin());
        auto lower = t;
        --lower[static_cast<std::size_t>(first)];
        parent_[j] = index.at(lower);
        factor_[j] = first;
    }
}

std::span<const int> MultiIndexBasis::exponents(Eigen::Index j) const {
    return {exponents_.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(n_),
            static_cast<std::size_t>(n_)};
}

Eigen::VectorXd MultiIndexBasis::evaluate(std::span<const double> x) const {
    Eigen::VectorXd out(size());
    evaluate_into(x, out);
    return out;
}

void MultiIndexBasis::evaluate_into(std::span<const double> x, Eigen::Ref<Eigen::VectorXd> out) const {
    if (static_cast<int>(x.size()) != n_) {
        throw ArgumentError("MultiIndexBasis::evaluate: expected a point of dimension " + std::to_string(n_) +
                            ", got " + std::to_string(x.size()));
    }
    if (out.size() != size()) {
        throw ArgumentError("MultiIndexBasis::evaluate: output has wrong size");
    }
    out[0] = 1.0;
    for (Eigen::Index j = 1; j < size(); ++j) {
        const auto js = static_cast<std::size_t>(j);
        out[j] = out[parent_[js]] * x[static_cast<std::size_t>(factor_[js])];
    }
}

}  // namespace christoffel
