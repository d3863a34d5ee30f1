#include "christoffel_cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <christoffel/error.hpp>

namespace christoffel::cli {

using nlohmann::json;

namespace {

// Typed access to one JSON object that remembers which keys were read, so
// misspelled keys are reported instead of silently ignored.
class Section {
public:
    Section(const json& doc, std::string path) : doc_(&doc), path_(std::move(path)) {
        if (!doc.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const char* key) const { return doc_->contains(key) && !(*doc_)[key].is_null(); }

    template <class T>
    std::optional<T> get(const char* key) {
        seen_.insert(key);
        if (!has(key)) return std::nullopt;
        try {
            return (*doc_)[key].get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where(key) + ": wrong type");
        }
    }

    template <class T>
    T require(const char* key) {
        auto v = get<T>(key);
        if (!v) throw ConfigError(where(key) + ": required field is missing");
        return *v;
    }

    std::optional<Section> child(const char* key) {
        seen_.insert(key);
        if (!has(key)) return std::nullopt;
        return Section((*doc_)[key], where(key));
    }

    const json& raw(const char* key) {
        seen_.insert(key);
        return (*doc_)[key];
    }

    void ignore(const char* key) { seen_.insert(key); }

    void finish() const {
        for (const auto& [key, value] : doc_->items()) {
            if (!seen_.count(key)) throw ConfigError(where(key.c_str()) + ": unknown field");
        }
    }

    std::string where(const char* key) const { return path_ + "." + key; }

private:
    const json* doc_;
    std::string path_;
    std::set<std::string> seen_;
};

std::vector<Interval> read_box(const json& doc, const std::string& path) {
    if (!doc.is_array()) throw ConfigError(path + ": expected an array of [lo, hi] pairs");
    std::vector<Interval> box;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& pair = doc[i];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
            throw ConfigError(path + "[" + std::to_string(i) + "]: expected [lo, hi]");
        }
        box.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    return box;
}

template <class T>
void maybe(Section& s, const char* key, T& target) {
    if (auto v = s.get<T>(key)) target = *v;
}

AlgorithmConfig parse_algorithm(Section s, int output_dim) {
    AlgorithmConfig c;
    maybe(s, "epsilon", c.epsilon);
    maybe(s, "delta", c.delta);
    maybe(s, "sigma0_sq", c.sigma0_sq);
    maybe(s, "degree", c.degree);
    c.eta = s.get<double>("eta");
    maybe(s, "initial_samples", c.initial_samples);
    maybe(s, "batch_size", c.batch_size);
    maybe(s, "max_iterations", c.max_iterations);
    c.max_samples = s.get<Eigen::Index>("max_samples");
    maybe(s, "kl_rank", c.kl_rank);
    maybe(s, "nystrom_rank", c.nystrom_rank);
    maybe(s, "gram_capacity", c.gram_capacity);
    maybe(s, "max_basis_dimension", c.max_basis_dimension);
    try {
        if (auto v = s.get<std::string>("kl_mode")) c.kl_mode = parse_kl_mode(*v);
        if (auto v = s.get<std::string>("kl_variant")) c.kl_variant = parse_kl_variant(*v);
        if (auto v = s.get<std::string>("evaluation")) c.evaluation = parse_kernel_evaluation(*v);
        if (auto k = s.child("kernel")) {
            const auto kind = k->require<std::string>("kind");
            if (kind == "squared_exponential") {
                c.kernel = KernelSpec::squared_exponential(k->require<double>("lengthscale"));
            } else if (kind == "polynomial") {
                c.kernel = KernelSpec::polynomial(MultiIndexBasis(output_dim, k->require<int>("degree")));
            } else {
                throw ConfigError(s.where("kernel.kind") + ": unknown kernel '" + kind + "'");
            }
            k->finish();
        }
        if (auto l = s.child("landmarks")) {
            const auto rule = l->get<std::string>("rule").value_or("uniform_random");
            if (rule == "first_r") {
                c.landmarks.rule = LandmarkRule::first_r;
            } else if (rule == "uniform_random") {
                c.landmarks.rule = LandmarkRule::uniform_random;
            } else {
                throw ConfigError(s.where("landmarks.rule") + ": unknown rule '" + rule + "'");
            }
            maybe(*l, "seed", c.landmarks.seed);
            l->finish();
        }
        s.finish();
        c.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError(s.where("") + " " + e.what());
    }
    return c;
}

}  // namespace

std::string_view to_string(AlgorithmKind kind) {
    switch (kind) {
        case AlgorithmKind::alg1: return "alg1";
        case AlgorithmKind::alg2: return "alg2";
        case AlgorithmKind::alg3: return "alg3";
    }
    return "alg3";
}

ReachProblem build_problem(const std::string& benchmark, const json& doc) {
    Section s(doc, "problem");
    s.ignore("benchmark");
    ReachProblem problem;
    std::optional<Section> params = s.child("parameters");
    if (benchmark == "duffing") {
        DuffingParams p;
        if (params) {
            maybe(*params, "damping", p.damping);
            maybe(*params, "forcing", p.forcing);
            maybe(*params, "frequency", p.frequency);
        }
        problem = duffing_problem(p);
    } else if (benchmark == "quadrotor") {
        QuadrotorParams p;
        if (params) {
            maybe(*params, "gravity", p.gravity);
            maybe(*params, "horizontal_gain", p.horizontal_gain);
            maybe(*params, "vertical_gain", p.vertical_gain);
            maybe(*params, "angle_stiffness", p.angle_stiffness);
            maybe(*params, "angle_damping", p.angle_damping);
            maybe(*params, "input_gain", p.input_gain);
        }
        problem = quadrotor_problem(p);
    } else if (benchmark == "traffic") {
        TrafficParams p;
        if (params) {
            maybe(*params, "segments", p.segments);
            maybe(*params, "period", p.period);
            maybe(*params, "free_flow_speed", p.free_flow_speed);
            maybe(*params, "congestion_speed", p.congestion_speed);
            maybe(*params, "jam_density", p.jam_density);
            maybe(*params, "capacity", p.capacity);
            maybe(*params, "outflow_scaling", p.outflow_scaling);
        }
        try {
            problem = traffic_problem(p);
        } catch (const ArgumentError& e) {
            throw ConfigError(std::string("problem.parameters: ") + e.what());
        }
    } else {
        throw ConfigError("problem.benchmark: unknown benchmark '" + benchmark +
                          "' (expected duffing, quadrotor or traffic)");
    }
    if (params) params->finish();

    if (s.has("initial_box")) problem.initial_box = read_box(s.raw("initial_box"), s.where("initial_box"));
    if (s.has("disturbance_box")) {
        problem.disturbance_box = read_box(s.raw("disturbance_box"), s.where("disturbance_box"));
    } else {
        s.ignore("disturbance_box");
    }
    if (auto range = s.get<std::vector<double>>("time_range")) {
        if (range->size() != 2) throw ConfigError(s.where("time_range") + ": expected [t0, t1]");
        problem.t0 = (*range)[0];
        problem.t1 = (*range)[1];
    }
    maybe(s, "integrator_steps", problem.steps);
    if (s.has("projection")) {
        problem.projection = s.require<std::vector<int>>("projection");
    } else if (doc.contains("projection")) {
        s.ignore("projection");
        problem.projection.clear();  // explicit null keeps the full state
    }
    s.finish();
    try {
        problem.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("problem: ") + e.what());
    }
    return problem;
}

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw ConfigError(origin + ":" + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
    }
    Section top(doc, origin);
    if (top.require<int>("format") != 1) throw ConfigError(top.where("format") + ": unsupported version");
    top.ignore("notes");

    RunConfig cfg;
    auto problem_section = top.child("problem");
    if (!problem_section) throw ConfigError(top.where("problem") + ": required field is missing");
    cfg.benchmark = problem_section->require<std::string>("benchmark");
    cfg.problem = build_problem(cfg.benchmark, doc["problem"]);

    const auto algorithm = top.require<std::string>("algorithm");
    if (algorithm == "alg1") {
        cfg.algorithm = AlgorithmKind::alg1;
    } else if (algorithm == "alg2") {
        cfg.algorithm = AlgorithmKind::alg2;
    } else if (algorithm == "alg3") {
        cfg.algorithm = AlgorithmKind::alg3;
    } else {
        throw ConfigError(top.where("algorithm") + ": expected alg1, alg2 or alg3");
    }

    const int out_dim = cfg.problem.output_dim();
    std::optional<AlgorithmConfig> sections[3];
    const char* names[3] = {"alg1", "alg2", "alg3"};
    for (int i = 0; i < 3; ++i) {
        if (auto s = top.child(names[i])) sections[i] = parse_algorithm(std::move(*s), out_dim);
    }
    auto& chosen = sections[static_cast<int>(cfg.algorithm)];
    if (!chosen) throw ConfigError(top.where(names[static_cast<int>(cfg.algorithm)]) + ": section for the selected algorithm is missing");
    cfg.settings = *chosen;
    if (cfg.algorithm == AlgorithmKind::alg2 && !cfg.settings.kernel) {
        throw ConfigError(top.where("alg2.kernel") + ": the kernel algorithm needs a kernel");
    }

    if (auto map = top.child("input_map")) {
        const auto center = map->require<std::vector<double>>("center");
        const auto scale = map->require<std::vector<double>>("scale");
        map->finish();
        if (center.size() != static_cast<std::size_t>(out_dim) || scale.size() != center.size()) {
            throw ConfigError(top.where("input_map") + ": center and scale need " + std::to_string(out_dim) + " entries");
        }
        AffineInputMap m{Eigen::Map<const Eigen::VectorXd>(center.data(), out_dim),
                         Eigen::Map<const Eigen::VectorXd>(scale.data(), out_dim)};
        if (!(m.scale.array() > 0.0).all()) throw ConfigError(top.where("input_map.scale") + ": must be positive");
        cfg.settings.input_map = std::move(m);
    }

    maybe(top, "seed", cfg.seed);
    maybe(top, "workers", cfg.workers);
    cfg.grid = top.get<std::string>("grid");
    cfg.n_validation = top.get<std::int64_t>("n_validation");
    maybe(top, "validation_delta", cfg.validation_delta);
    cfg.output_dir = top.get<std::string>("output_dir");
    top.finish();
    if (cfg.n_validation && *cfg.n_validation < 1) throw ConfigError(top.where("n_validation") + ": must be >= 1");
    if (!(cfg.validation_delta > 0.0 && cfg.validation_delta < 1.0)) {
        throw ConfigError(top.where("validation_delta") + ": must lie in (0, 1)");
    }
    if (cfg.workers < 1) throw ConfigError(top.where("workers") + ": must be >= 1");
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str(), path.string());
}

}  // namespace christoffel::cli
