#include "christoffel/systems.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "christoffel/error.hpp"
#include "christoffel/random.hpp"

namespace christoffel {

DynamicalSystem duffing(const DuffingParams& p) {
    DynamicalSystem sys;
    sys.name = "duffing";
    sys.state_dim = 2;
    sys.disturbance_dim = 0;
    sys.state_names = {"z", "y"};
    sys.field = [p](double t, std::span<const double> x, std::span<const double>, std::span<double> dx) {
        const double z = x[0];
        const double y = x[1];
        dx[0] = y;
        dx[1] = -p.damping * y + z - z * z * z + p.forcing * std::cos(p.frequency * t);
    };
    return sys;
}

DynamicalSystem quadrotor(const QuadrotorParams& p) {
    DynamicalSystem sys;
    sys.name = "quadrotor";
    sys.state_dim = 6;
    sys.disturbance_dim = 2;
    sys.state_names = {"p_x", "v_x", "p_h", "v_h", "theta", "omega"};
    sys.field = [p](double, std::span<const double> x, std::span<const double> u, std::span<double> dx) {
        const double theta = x[4];
        dx[0] = x[1];
        dx[1] = u[0] * p.horizontal_gain * std::sin(theta);
        dx[2] = x[3];
        dx[3] = -p.gravity + u[0] * p.vertical_gain * std::cos(theta);
        dx[4] = x[5];
        dx[5] = -p.angle_stiffness * theta - p.angle_damping * x[5] + p.input_gain * u[1];
    };
    return sys;
}

DynamicalSystem traffic(const TrafficParams& p) {
    if (p.segments < 2) throw ArgumentError("traffic model needs at least 2 segments");
    DynamicalSystem sys;
    sys.name = "traffic";
    sys.state_dim = p.segments;
    sys.disturbance_dim = 1;
    for (int i = 1; i <= p.segments; ++i) sys.state_names.push_back("x" + std::to_string(i));
    sys.field = [p](double, std::span<const double> x, std::span<const double> d, std::span<double> dx) {
        const std::size_t n = x.size();
        // Flow from segment i into i+1: limited by capacity, sending and receiving.
        const auto flow = [&](std::size_t i) {
            double receive = p.congestion_speed * (p.jam_density - x[i + 1]);
            if (i + 1 == n - 1) receive /= p.outflow_scaling;
            return std::min({p.capacity, p.free_flow_speed * x[i], receive});
        };
        double inflow = d[0];
        for (std::size_t i = 0; i < n; ++i) {
            const double outflow = i + 1 < n ? flow(i) : std::min(p.capacity, p.free_flow_speed * x[i]);
            dx[i] = (inflow - outflow) / p.period;
            inflow = outflow;
        }
    };
    return sys;
}

Eigen::VectorXd rk4_integrate(const DynamicalSystem& system, std::span<const double> x0, std::span<const double> d,
                              double t0, double t1, int steps) {
    if (steps < 1) throw ArgumentError("rk4_integrate: steps must be >= 1");
    const auto n = static_cast<std::size_t>(system.state_dim);
    if (x0.size() != n || d.size() != static_cast<std::size_t>(system.disturbance_dim)) {
        throw ArgumentError("rk4_integrate: state or disturbance dimension mismatch");
    }
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), tmp(n);
    const auto f = [&](double t, const Eigen::VectorXd& state, Eigen::VectorXd& out) {
        system.field(t, {state.data(), n}, d, {out.data(), n});
    };
    const double h = (t1 - t0) / steps;
    for (int k = 0; k < steps; ++k) {
        const double t = t0 + k * h;
        f(t, x, k1);
        tmp = x + 0.5 * h * k1;
        f(t + 0.5 * h, tmp, k2);
        tmp = x + 0.5 * h * k2;
        f(t + 0.5 * h, tmp, k3);
        tmp = x + h * k3;
        f(t + h, tmp, k4);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite()) throw IntegrationError(static_cast<std::size_t>(k), "non-finite state in " + system.name);
    }
    return x;
}

void ReachProblem::validate() const {
    if (system.state_dim < 1 || !system.field) throw ArgumentError("reach problem: system is not defined");
    if (initial_box.size() != static_cast<std::size_t>(system.state_dim)) {
        throw ArgumentError("reach problem: initial box has " + std::to_string(initial_box.size()) +
                            " intervals, system has " + std::to_string(system.state_dim) + " states");
    }
    if (disturbance_box.size() != static_cast<std::size_t>(system.disturbance_dim)) {
        throw ArgumentError("reach problem: disturbance box size does not match the system");
    }
    for (const auto& box : {initial_box, disturbance_box}) {
        for (const auto& iv : box) {
            if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
                throw ArgumentError("reach problem: every interval needs finite lo <= hi");
            }
        }
    }
    if (!(t1 > t0)) throw ArgumentError("reach problem: t1 must exceed t0");
    if (steps < 1) throw ArgumentError("reach problem: integrator steps must be >= 1");
    std::vector<int> sorted = projection;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ArgumentError("reach problem: projection indices must be distinct");
    }
    for (const int i : projection) {
        if (i < 0 || i >= system.state_dim) throw ArgumentError("reach problem: projection index out of range");
    }
}

int ReachProblem::output_dim() const {
    return projection.empty() ? system.state_dim : static_cast<int>(projection.size());
}

std::vector<std::string> ReachProblem::output_names() const {
    if (projection.empty()) return system.state_names;
    std::vector<std::string> names;
    for (const int i : projection) names.push_back(system.state_names[static_cast<std::size_t>(i)]);
    return names;
}

ReachProblem duffing_problem(const DuffingParams& params) {
    ReachProblem p;
    p.system = duffing(params);
    p.initial_box = {{0.95, 1.05}, {-0.05, 0.05}};
    p.t0 = 0.0;
    p.t1 = 100.0;
    p.steps = 2000;
    return p;
}

ReachProblem quadrotor_problem(const QuadrotorParams& params) {
    constexpr double pi = std::numbers::pi;
    ReachProblem p;
    p.system = quadrotor(params);
    p.initial_box = {{-1.7, 1.7}, {-0.8, 0.8}, {0.3, 2.0}, {-1.0, 1.0}, {-pi / 12, pi / 12}, {-pi / 2, pi / 2}};
    const double hover = params.gravity / params.vertical_gain;
    p.disturbance_box = {{-1.5 + hover, 1.5 + hover}, {-pi / 4, pi / 4}};
    p.t0 = 0.0;
    p.t1 = 5.0;
    p.steps = 500;
    p.projection = {0, 2};
    return p;
}

ReachProblem traffic_problem(const TrafficParams& params) {
    ReachProblem p;
    p.system = traffic(params);
    p.initial_box.assign(static_cast<std::size_t>(params.segments), Interval{100.0, 200.0});
    p.disturbance_box = {{40.0 / params.period, 60.0 / params.period}};
    p.t0 = 0.0;
    p.t1 = 4.0 * params.period;
    p.steps = 1200;
    p.projection = {params.segments - 2, params.segments - 1};
    return p;
}

namespace {

Eigen::VectorXd project(const ReachProblem& problem, const Eigen::VectorXd& state) {
    if (problem.projection.empty()) return state;
    Eigen::VectorXd out(static_cast<Eigen::Index>(problem.projection.size()));
    for (std::size_t i = 0; i < problem.projection.size(); ++i) out[static_cast<Eigen::Index>(i)] = state[problem.projection[i]];
    return out;
}

FunctionSource::Generator reach_generator(std::shared_ptr<const ReachProblem> problem) {
    return [problem](std::mt19937_64& engine, std::span<double> out) {
        const ReachProblem& p = *problem;
        std::vector<double> x0(p.initial_box.size());
        std::vector<double> d(p.disturbance_box.size());
        for (std::size_t i = 0; i < x0.size(); ++i) {
            x0[i] = p.initial_box[i].lo + (p.initial_box[i].hi - p.initial_box[i].lo) * uniform01(engine);
        }
        for (std::size_t i = 0; i < d.size(); ++i) {
            d[i] = p.disturbance_box[i].lo + (p.disturbance_box[i].hi - p.disturbance_box[i].lo) * uniform01(engine);
        }
        const Eigen::VectorXd final_state = project(p, rk4_integrate(p.system, x0, d, p.t0, p.t1, p.steps));
        std::copy(final_state.data(), final_state.data() + final_state.size(), out.begin());
    };
}

std::shared_ptr<const ReachProblem> validated(ReachProblem problem) {
    problem.validate();
    return std::make_shared<const ReachProblem>(std::move(problem));
}

}  // namespace

ReachSampler::ReachSampler(ReachProblem problem, std::uint64_t seed, unsigned workers)
    : problem_(validated(std::move(problem))),
      source_(problem_->output_dim(), seed, reach_generator(problem_), workers) {}

std::vector<Interval> interval_hull(const Dataset& data) {
    if (data.empty()) throw ArgumentError("interval_hull: dataset is empty");
    std::vector<Interval> hull;
    const auto& m = data.matrix();
    for (int j = 0; j < data.dim(); ++j) hull.push_back({m.col(j).minCoeff(), m.col(j).maxCoeff()});
    return hull;
}

std::vector<Interval> monotone_corner_hull(const ReachProblem& problem) {
    problem.validate();
    std::vector<double> lo_state, hi_state, lo_dist, hi_dist;
    for (const auto& iv : problem.initial_box) {
        lo_state.push_back(iv.lo);
        hi_state.push_back(iv.hi);
    }
    for (const auto& iv : problem.disturbance_box) {
        lo_dist.push_back(iv.lo);
        hi_dist.push_back(iv.hi);
    }
    const Eigen::VectorXd lo =
        project(problem, rk4_integrate(problem.system, lo_state, lo_dist, problem.t0, problem.t1, problem.steps));
    const Eigen::VectorXd hi =
        project(problem, rk4_integrate(problem.system, hi_state, hi_dist, problem.t0, problem.t1, problem.steps));
    std::vector<Interval> hull;
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (lo[i] > hi[i]) throw ArgumentError("monotone_corner_hull: corner images are not ordered; system is not monotone");
        hull.push_back({lo[i], hi[i]});
    }
    return hull;
}

}  // namespace christoffel
