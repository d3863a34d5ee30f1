#include "christoffel/dataset.hpp"

#include <cmath>
#include <string>

#include "christoffel/error.hpp"

namespace christoffel {

Dataset::Dataset(int dim) : points_(0, dim) {
    if (dim < 1) throw ArgumentError("Dataset: dimension must be positive");
}

Dataset::Dataset(PointMatrix points) : points_(std::move(points)) {
    if (points_.cols() < 1) throw ArgumentError("Dataset: dimension must be positive");
}

void Dataset::append(const Dataset& other) {
    if (other.empty()) return;
    if (points_.cols() == 0 && points_.rows() == 0) {
        points_ = other.points_;
        return;
    }
    if (other.dim() != dim()) {
        throw ArgumentError("Dataset::append: dimension " + std::to_string(other.dim()) + " does not match " +
                            std::to_string(dim()));
    }
    const auto old_rows = points_.rows();
    points_.conservativeResize(old_rows + other.size(), Eigen::NoChange);
    points_.bottomRows(other.size()) = other.points_;
}

Dataset Dataset::head(Eigen::Index count) const {
    if (count < 0 || count > size()) throw ArgumentError("Dataset::head: count out of range");
    return Dataset(PointMatrix(points_.topRows(count)));
}

Dataset Dataset::project(std::span<const int> coordinates) const {
    PointMatrix out(size(), static_cast<Eigen::Index>(coordinates.size()));
    for (std::size_t k = 0; k < coordinates.size(); ++k) {
        const int c = coordinates[k];
        if (c < 0 || c >= dim()) throw ArgumentError("Dataset::project: coordinate index out of range");
        out.col(static_cast<Eigen::Index>(k)) = points_.col(c);
    }
    return Dataset(std::move(out));
}

Eigen::Index Dataset::first_non_finite() const {
    for (Eigen::Index i = 0; i < size(); ++i) {
        if (!points_.row(i).allFinite()) return i;
    }
    return -1;
}

}  // namespace christoffel
