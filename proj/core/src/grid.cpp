#include "christoffel/grid.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "christoffel/error.hpp"
#include "christoffel/format.hpp"

namespace christoffel {

namespace {

template <class T>
T parse_number(const std::string& text, const std::string& spec) {
    T value{};
    const char* end = text.data() + text.size();
    const auto result = std::from_chars(text.data(), end, value);
    if (text.empty() || result.ec != std::errc() || result.ptr != end) {
        throw ArgumentError("grid spec '" + spec + "': '" + text + "' is not a number");
    }
    return value;
}

using Point2 = std::array<double, 2>;

double cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Andrew's monotone chain; counter-clockwise without collinear points.
std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Point2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

bool strictly_inside(const std::vector<Point2>& hull, const Point2& p) {
    if (hull.size() < 3) return false;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        if (cross(hull[i], hull[(i + 1) % hull.size()], p) <= 0) return false;
    }
    return true;
}

}  // namespace

std::vector<GridAxis> parse_grid_spec(const std::string& spec) {
    std::vector<GridAxis> axes;
    for (const auto& part : split(spec, ',')) {
        const auto fields = split(part, ':');
        if (fields.size() != 3) throw ArgumentError("grid spec '" + spec + "': each axis needs lo:hi:count");
        GridAxis axis{parse_number<double>(fields[0], spec), parse_number<double>(fields[1], spec),
                      parse_number<int>(fields[2], spec)};
        if (axis.count < 2) throw ArgumentError("grid spec '" + spec + "': count must be >= 2 on every axis");
        if (!(axis.lo < axis.hi) || !std::isfinite(axis.lo) || !std::isfinite(axis.hi)) {
            throw ArgumentError("grid spec '" + spec + "': need finite lo < hi on every axis");
        }
        axes.push_back(axis);
    }
    if (axes.empty()) throw ArgumentError("grid spec is empty");
    return axes;
}

Dataset grid_points(const std::vector<GridAxis>& axes) {
    Eigen::Index total = 1;
    for (const auto& a : axes) total *= a.count;
    const auto dim = static_cast<Eigen::Index>(axes.size());
    PointMatrix points(total, dim);
    std::vector<int> idx(axes.size(), 0);
    for (Eigen::Index row = 0; row < total; ++row) {
        for (Eigen::Index j = 0; j < dim; ++j) points(row, j) = axes[static_cast<std::size_t>(j)].node(idx[static_cast<std::size_t>(j)]);
        for (Eigen::Index j = dim - 1; j >= 0; --j) {
            auto& i = idx[static_cast<std::size_t>(j)];
            if (++i < axes[static_cast<std::size_t>(j)].count) break;
            i = 0;
        }
    }
    return Dataset(std::move(points));
}

GridEvaluation evaluate_grid(const SupportEstimate& estimate, const std::vector<GridAxis>& axes) {
    if (static_cast<int>(axes.size()) != estimate.dim()) {
        throw ArgumentError("grid has " + std::to_string(axes.size()) + " axes but the estimate has dimension " +
                            std::to_string(estimate.dim()));
    }
    GridEvaluation grid;
    grid.axes = axes;
    grid.points = grid_points(axes);
    grid.values = estimate.values(grid.points);
    grid.member.resize(static_cast<std::size_t>(grid.values.size()));
    for (Eigen::Index i = 0; i < grid.values.size(); ++i) {
        grid.member[static_cast<std::size_t>(i)] = grid.values[i] <= estimate.threshold() ? 1 : 0;
    }
    return grid;
}

void write_grid_csv(std::ostream& out, const std::vector<std::string>& axis_names, const GridEvaluation& grid) {
    if (axis_names.size() != grid.axes.size()) throw ArgumentError("write_grid_csv: axis name count mismatch");
    for (const auto& name : axis_names) out << name << ',';
    out << "kappa_inv,member\n";
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        for (const double x : grid.points.point(i)) out << format_double(x) << ',';
        out << format_double(grid.values[i]) << ',' << int(grid.member[static_cast<std::size_t>(i)]) << '\n';
    }
}

HoleReport find_holes(const GridEvaluation& grid) {
    if (grid.axes.size() != 2) throw ArgumentError("find_holes: grid must be 2-D");
    const int rows = grid.axes[0].count;
    const int cols = grid.axes[1].count;
    const auto at = [cols](int i, int j) { return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j); };

    std::vector<Point2> members;
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            if (grid.member[at(i, j)]) members.push_back({grid.axes[0].node(i), grid.axes[1].node(j)});
        }
    }
    const auto hull = convex_hull(std::move(members));

    HoleReport report;
    std::vector<int> label(grid.member.size(), -1);
    std::vector<std::pair<int, int>> stack;
    int next_label = 0;
    for (int si = 0; si < rows; ++si) {
        for (int sj = 0; sj < cols; ++sj) {
            if (grid.member[at(si, sj)] || label[at(si, sj)] >= 0) continue;
            bool touches_border = false;
            std::int64_t inside = 0;
            std::int64_t size = 0;
            stack.assign(1, {si, sj});
            label[at(si, sj)] = next_label;
            while (!stack.empty()) {
                const auto [i, j] = stack.back();
                stack.pop_back();
                ++size;
                if (i == 0 || j == 0 || i == rows - 1 || j == cols - 1) touches_border = true;
                if (strictly_inside(hull, {grid.axes[0].node(i), grid.axes[1].node(j)})) ++inside;
                constexpr int di[] = {1, -1, 0, 0};
                constexpr int dj[] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int ni = i + di[k];
                    const int nj = j + dj[k];
                    if (ni < 0 || nj < 0 || ni >= rows || nj >= cols) continue;
                    if (grid.member[at(ni, nj)] || label[at(ni, nj)] >= 0) continue;
                    label[at(ni, nj)] = next_label;
                    stack.emplace_back(ni, nj);
                }
            }
            ++next_label;
            report.interior_excluded_nodes += inside;
            if (inside > 0) ++report.interior_components;
            if (!touches_border) {
                ++report.enclosed_components;
                report.enclosed_nodes += size;
            }
        }
    }
    return report;
}

std::optional<std::vector<Interval>> member_bounding_box(const GridEvaluation& grid) {
    std::optional<std::vector<Interval>> box;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        if (!grid.member[static_cast<std::size_t>(i)]) continue;
        const auto p = grid.points.point(i);
        if (!box) {
            box.emplace();
            for (const double x : p) box->push_back({x, x});
            continue;
        }
        for (std::size_t j = 0; j < p.size(); ++j) {
            (*box)[j].lo = std::min((*box)[j].lo, p[j]);
            (*box)[j].hi = std::max((*box)[j].hi, p[j]);
        }
    }
    return box;
}

double member_volume(const GridEvaluation& grid) {
    if (grid.size() == 0) return 0.0;
    double volume = 1.0;
    for (const auto& a : grid.axes) volume *= a.hi - a.lo;
    const auto hits = std::count(grid.member.begin(), grid.member.end(), std::uint8_t{1});
    return volume * static_cast<double>(hits) / static_cast<double>(grid.size());
}

}  // namespace christoffel
