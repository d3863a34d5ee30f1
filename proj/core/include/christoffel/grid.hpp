#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "christoffel/dataset.hpp"
#include "christoffel/estimators.hpp"
#include "christoffel/systems.hpp"

namespace christoffel {

/// `count` equally spaced nodes from lo to hi inclusive.
struct GridAxis {
    double lo = 0.0;
    double hi = 1.0;
    int count = 2;

    double node(int i) const { return i + 1 == count ? hi : lo + (hi - lo) * i / (count - 1); }
};

/// Parses "lo:hi:count,lo:hi:count,...". Throws ArgumentError when a field
/// is not numeric, count < 2 or lo >= hi.
std::vector<GridAxis> parse_grid_spec(const std::string& spec);

/// All nodes in row-major order: the last axis varies fastest.
Dataset grid_points(const std::vector<GridAxis>& axes);

struct GridEvaluation {
    std::vector<GridAxis> axes;
    Dataset points;
    Eigen::VectorXd values;
    std::vector<std::uint8_t> member;  // values <= threshold

    Eigen::Index size() const noexcept { return points.size(); }
};

GridEvaluation evaluate_grid(const SupportEstimate& estimate, const std::vector<GridAxis>& axes);

/// Columns: axis names, kappa_inv, member.
void write_grid_csv(std::ostream& out, const std::vector<std::string>& axis_names, const GridEvaluation& grid);

/// Excluded regions of a 2-D membership grid. Components are 4-connected
/// sets of excluded nodes.
struct HoleReport {
    /// Excluded nodes strictly inside the convex hull of member nodes.
    std::int64_t interior_excluded_nodes = 0;
    /// Excluded components with at least one node strictly inside that hull.
    int interior_components = 0;
    /// Excluded components that do not touch the grid border.
    int enclosed_components = 0;
    std::int64_t enclosed_nodes = 0;
};

HoleReport find_holes(const GridEvaluation& grid);

/// Per-axis min/max over member nodes; empty when no node is a member.
std::optional<std::vector<Interval>> member_bounding_box(const GridEvaluation& grid);

/// Member fraction times the grid box volume.
double member_volume(const GridEvaluation& grid);

}  // namespace christoffel
