#pragma once

#include <span>

#include <Eigen/Core>

namespace christoffel {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// N samples of dimension n, one row per sample.
///
/// Finiteness is not enforced here; estimators reject non-finite data at fit
/// time with a NumericError naming the offending sample.
class Dataset {
public:
    Dataset() = default;
    /// Empty dataset of a fixed dimension, for accumulating batches.
    explicit Dataset(int dim);
    explicit Dataset(PointMatrix points);

    Eigen::Index size() const noexcept { return points_.rows(); }
    int dim() const noexcept { return static_cast<int>(points_.cols()); }
    bool empty() const noexcept { return points_.rows() == 0; }

    std::span<const double> point(Eigen::Index i) const {
        return {points_.data() + i * points_.cols(), static_cast<std::size_t>(points_.cols())};
    }
    const PointMatrix& matrix() const noexcept { return points_; }

    /// Appends all rows of `other`; dimensions must agree.
    void append(const Dataset& other);
    /// The first `count` samples.
    Dataset head(Eigen::Index count) const;
    /// Keeps the listed coordinates, in order.
    Dataset project(std::span<const int> coordinates) const;

    /// Index of the first sample with a non-finite coordinate, or -1.
    Eigen::Index first_non_finite() const;

private:
    PointMatrix points_;
};

}  // namespace christoffel
