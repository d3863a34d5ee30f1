#include "christoffel/sampling.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

#include "christoffel/error.hpp"
#include "christoffel/random.hpp"

namespace christoffel {

FunctionSource::FunctionSource(int dim, std::uint64_t seed, Generator generator, unsigned workers)
    : dim_(dim), seed_(seed), generator_(std::move(generator)), workers_(std::max(1u, workers)) {
    if (dim < 1) throw ArgumentError("sample source dimension must be >= 1");
}

Dataset FunctionSource::draw(std::uint64_t stream, std::uint64_t first, Eigen::Index count) const {
    if (count < 0) throw ArgumentError("sample count must be >= 0");
    PointMatrix points(count, dim_);
    const auto fill = [&](Eigen::Index lo, Eigen::Index hi) {
        for (Eigen::Index i = lo; i < hi; ++i) {
            const std::uint64_t index = first + static_cast<std::uint64_t>(i);
            auto engine = counter_engine(seed_, stream, index);
            try {
                generator_(engine, std::span<double>(points.data() + i * dim_, static_cast<std::size_t>(dim_)));
            } catch (const IntegrationError& e) {
                throw e.at_sample(static_cast<long long>(index));
            }
        }
    };

    const auto workers = static_cast<Eigen::Index>(std::min<std::uint64_t>(workers_, std::max<Eigen::Index>(count, 1)));
    if (workers <= 1) {
        fill(0, count);
        return Dataset(std::move(points));
    }
    // Each worker owns a contiguous slice; the first failure by sample index wins.
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    {
        std::vector<std::jthread> threads;
        const Eigen::Index per = (count + workers - 1) / workers;
        for (Eigen::Index w = 0; w < workers; ++w) {
            const Eigen::Index lo = std::min(count, w * per);
            const Eigen::Index hi = std::min(count, lo + per);
            threads.emplace_back([&, w, lo, hi] {
                try {
                    fill(lo, hi);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return Dataset(std::move(points));
}

}  // namespace christoffel
