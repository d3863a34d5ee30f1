#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "christoffel/dataset.hpp"
#include "christoffel/sampling.hpp"

namespace christoffel {

/// dx/dt = f(t, x, d) with a disturbance held constant over the horizon.
struct DynamicalSystem {
    using VectorField =
        std::function<void(double t, std::span<const double> x, std::span<const double> d, std::span<double> dxdt)>;

    std::string name;
    int state_dim = 0;
    int disturbance_dim = 0;
    std::vector<std::string> state_names;
    VectorField field;
};

struct DuffingParams {
    double damping = 0.05;
    double forcing = 0.4;
    double frequency = 1.3;
};

struct QuadrotorParams {
    double gravity = 9.81;
    double horizontal_gain = 0.64;  // multiplies u1 sin(theta)
    double vertical_gain = 0.64;    // multiplies u1 cos(theta)
    double angle_stiffness = 70.0;
    double angle_damping = 17.0;
    double input_gain = 55.0;
};

/// Cell transmission model of a single lane split into equal segments.
struct TrafficParams {
    int segments = 6;
    double period = 30.0;
    double free_flow_speed = 0.5;
    double congestion_speed = 1.0 / 6.0;
    double jam_density = 320.0;
    double capacity = 40.0;
    double outflow_scaling = 1.0;  // divides the receiving term of the last segment
};

/// States (z, y): z' = y, y' = -damping y + z - z^3 + forcing cos(frequency t).
DynamicalSystem duffing(const DuffingParams& params = {});
/// States (p_x, v_x, p_h, v_h, theta, omega); disturbances (u1, u2).
DynamicalSystem quadrotor(const QuadrotorParams& params = {});
/// States x1..xn (segment densities); disturbance: constant inflow.
DynamicalSystem traffic(const TrafficParams& params = {});

/// Classical fixed-step RK4 with h = (t1 - t0) / steps. Throws
/// IntegrationError with the step index on a non-finite state.
Eigen::VectorXd rk4_integrate(const DynamicalSystem& system, std::span<const double> x0, std::span<const double> d,
                              double t0, double t1, int steps);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const Interval&) const = default;
};

/// Reachability problem: final states at t1 from uniform initial states and
/// uniform constant disturbances, optionally projected to a coordinate subset.
struct ReachProblem {
    DynamicalSystem system;
    std::vector<Interval> initial_box;
    std::vector<Interval> disturbance_box;
    double t0 = 0.0;
    double t1 = 1.0;
    int steps = 100;
    std::vector<int> projection;  // empty keeps the full state

    /// Throws ArgumentError on inconsistent boxes, times or projection.
    void validate() const;
    int output_dim() const;
    std::vector<std::string> output_names() const;
};

ReachProblem duffing_problem(const DuffingParams& params = {});
ReachProblem quadrotor_problem(const QuadrotorParams& params = {});
ReachProblem traffic_problem(const TrafficParams& params = {});

/// Draws reach-problem samples. Per sample, the engine produces the initial
/// state coordinates first and then the disturbance coordinates.
class ReachSampler : public SampleSource {
public:
    ReachSampler(ReachProblem problem, std::uint64_t seed, unsigned workers = 1);

    int dim() const override { return source_.dim(); }
    Dataset draw(std::uint64_t stream, std::uint64_t first, Eigen::Index count) const override {
        return source_.draw(stream, first, count);
    }
    const ReachProblem& problem() const noexcept { return *problem_; }

private:
    std::shared_ptr<const ReachProblem> problem_;
    FunctionSource source_;
};

/// Componentwise min/max of a non-empty dataset.
std::vector<Interval> interval_hull(const Dataset& data);

/// Interval hull of the reachable set of a monotone system, from the two
/// extreme corners (all lower bounds, all upper bounds), projected.
std::vector<Interval> monotone_corner_hull(const ReachProblem& problem);

}  // namespace christoffel
