#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>

#include "christoffel/dataset.hpp"

namespace christoffel {

inline constexpr std::uint64_t kTrainingStream = 0;
inline constexpr std::uint64_t kValidationStream = 1;

/// An iid generator of samples of a random vector. Sample `index` of
/// `stream` is a pure function of (seed, stream, index), so any batching
/// reproduces the same sequence and distinct streams are independent.
class SampleSource {
public:
    virtual ~SampleSource() = default;
    virtual int dim() const = 0;
    /// Samples first, ..., first + count - 1 of the stream, in index order.
    virtual Dataset draw(std::uint64_t stream, std::uint64_t first, Eigen::Index count) const = 0;
};

/// Builds a source from a per-sample generator that writes one point using
/// the engine dedicated to that sample. Batches are split across `workers`
/// threads; output does not depend on the worker count.
class FunctionSource : public SampleSource {
public:
    using Generator = std::function<void(std::mt19937_64& engine, std::span<double> out)>;

    FunctionSource(int dim, std::uint64_t seed, Generator generator, unsigned workers = 1);

    int dim() const override { return dim_; }
    Dataset draw(std::uint64_t stream, std::uint64_t first, Eigen::Index count) const override;

private:
    int dim_;
    std::uint64_t seed_;
    Generator generator_;
    unsigned workers_;
};

/// Sequential reader over one stream of a source.
class SampleCursor {
public:
    SampleCursor(const SampleSource& source, std::uint64_t stream, std::uint64_t start = 0)
        : source_(&source), stream_(stream), next_(start) {}

    Dataset next(Eigen::Index count) {
        Dataset out = source_->draw(stream_, next_, count);
        next_ += static_cast<std::uint64_t>(count);
        return out;
    }
    std::uint64_t position() const noexcept { return next_; }

private:
    const SampleSource* source_;
    std::uint64_t stream_;
    std::uint64_t next_;
};

}  // namespace christoffel
