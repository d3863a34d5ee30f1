#include "christoffel/serialization.hpp"

#include <cmath>
#include <limits>

#include "christoffel/error.hpp"

namespace christoffel {

using nlohmann::json;

namespace {

template <class T>
T field(const json& doc, const char* key, const char* context) {
    if (!doc.is_object() || !doc.contains(key)) {
        throw ConfigError(std::string(context) + ": missing field '" + key + "'");
    }
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string(context) + ": field '" + key + "' has the wrong type (" + e.what() + ")");
    }
}

json encode_double(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
    return v;
}

double decode_double(const json& v, const char* context) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "Infinity") return std::numeric_limits<double>::infinity();
        if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
        if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    }
    throw ConfigError(std::string(context) + ": expected a number");
}

json matrix_rows(const Eigen::MatrixXd& m, bool lower_only) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        const Eigen::Index cols = lower_only ? i + 1 : m.cols();
        for (Eigen::Index j = 0; j < cols; ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd read_lower(const json& rows, Eigen::Index n, const char* context) {
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) {
        throw ConfigError(std::string(context) + ": factor must have " + std::to_string(n) + " rows");
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) < i + 1 || static_cast<Eigen::Index>(row.size()) > n) {
            throw ConfigError(std::string(context) + ": factor row " + std::to_string(i) + " has the wrong length");
        }
        for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    return m;
}

json dataset_rows(const Dataset& data) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        const auto p = data.point(i);
        rows.push_back(json(std::vector<double>(p.begin(), p.end())));
    }
    return rows;
}

Dataset read_dataset(const json& rows, int dim, const char* context) {
    if (!rows.is_array() || rows.empty()) throw ConfigError(std::string(context) + ": data must be a non-empty array");
    PointMatrix m(static_cast<Eigen::Index>(rows.size()), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto row = rows[i].get<std::vector<double>>();
        if (row.size() != static_cast<std::size_t>(dim)) {
            throw ConfigError(std::string(context) + ": data row " + std::to_string(i) + " has the wrong length");
        }
        for (int j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), j) = row[static_cast<std::size_t>(j)];
    }
    return Dataset(std::move(m));
}

json kernel_to_json(const KernelSpec& kernel) {
    if (const auto* se = std::get_if<SquaredExponential>(&kernel.kind())) {
        return {{"kind", "squared_exponential"}, {"lengthscale", se->lengthscale}};
    }
    const auto& p = std::get<PolynomialInner>(kernel.kind());
    return {{"kind", "polynomial"}, {"n", p.basis.n()}, {"m", p.basis.m()}};
}

KernelSpec kernel_from_json(const json& doc) {
    const auto kind = field<std::string>(doc, "kind", "kernel");
    if (kind == "squared_exponential") return KernelSpec::squared_exponential(field<double>(doc, "lengthscale", "kernel"));
    if (kind == "polynomial") {
        return KernelSpec::polynomial(MultiIndexBasis(field<int>(doc, "n", "kernel"), field<int>(doc, "m", "kernel")));
    }
    throw ConfigError("kernel: unknown kind '" + kind + "'");
}

}  // namespace

json to_json(const PacCertificate& c) {
    json trace = json::array();
    for (const auto& r : c.trace) {
        trace.push_back({{"iteration", r.iteration},
                         {"n_samples", r.n_samples},
                         {"empirical_risk", r.empirical_risk},
                         {"kl_divergence", r.kl_divergence},
                         {"delta_i", r.delta_i},
                         {"gamma", r.gamma},
                         {"risk_bound", r.risk_bound},
                         {"log_term", r.log_term},
                         {"epsilon", encode_double(r.epsilon)}});
    }
    json doc = {{"format", kFormatVersion},
                {"method", std::string(to_string(c.method))},
                {"status", std::string(to_string(c.status))},
                {"epsilon", c.epsilon},
                {"delta", c.delta},
                {"n_samples", c.n_samples},
                {"achieved_epsilon", encode_double(c.achieved_epsilon())},
                {"trace", std::move(trace)}};
    doc["vc_dimension"] = c.vc_dimension ? json(*c.vc_dimension) : json(nullptr);
    return doc;
}

PacCertificate certificate_from_json(const json& doc) {
    constexpr const char* ctx = "certificate";
    if (field<int>(doc, "format", ctx) != kFormatVersion) throw ConfigError("certificate: unsupported format version");
    PacCertificate c;
    try {
        c.method = parse_certificate_method(field<std::string>(doc, "method", ctx));
        c.status = parse_certificate_status(field<std::string>(doc, "status", ctx));
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("certificate: ") + e.what());
    }
    c.epsilon = field<double>(doc, "epsilon", ctx);
    c.delta = field<double>(doc, "delta", ctx);
    c.n_samples = field<std::int64_t>(doc, "n_samples", ctx);
    if (doc.contains("vc_dimension") && !doc["vc_dimension"].is_null()) {
        c.vc_dimension = doc["vc_dimension"].get<std::uint64_t>();
    }
    for (const auto& r : field<json>(doc, "trace", ctx)) {
        constexpr const char* rctx = "certificate trace";
        IterationRecord rec;
        rec.iteration = field<int>(r, "iteration", rctx);
        rec.n_samples = field<std::int64_t>(r, "n_samples", rctx);
        rec.empirical_risk = field<double>(r, "empirical_risk", rctx);
        rec.kl_divergence = field<double>(r, "kl_divergence", rctx);
        rec.delta_i = field<double>(r, "delta_i", rctx);
        rec.gamma = field<double>(r, "gamma", rctx);
        rec.risk_bound = field<double>(r, "risk_bound", rctx);
        rec.log_term = field<double>(r, "log_term", rctx);
        rec.epsilon = decode_double(field<json>(r, "epsilon", rctx), rctx);
        c.trace.push_back(rec);
    }
    return c;
}

json to_json(const SupportEstimate& estimate) {
    json doc = {{"format", kFormatVersion}, {"n", estimate.dim()}, {"threshold", encode_double(estimate.threshold())}};
    doc["coordinate_names"] = estimate.coordinate_names;
    if (estimate.input_map()) {
        const auto& map = *estimate.input_map();
        doc["input_map"] = {{"center", std::vector<double>(map.center.begin(), map.center.end())},
                            {"scale", std::vector<double>(map.scale.begin(), map.scale.end())}};
    } else {
        doc["input_map"] = nullptr;
    }
    std::visit(
        [&](const auto& est) {
            using T = std::decay_t<decltype(est)>;
            doc["sigma0_sq"] = est.sigma0_sq();
            doc["N"] = est.n_samples();
            doc["jitter"] = est.jitter();
            if constexpr (std::is_same_v<T, PolyChristoffelEstimator>) {
                doc["type"] = "poly";
                doc["m"] = est.basis().m();
                doc["factor"] = matrix_rows(est.factor(), true);
            } else if constexpr (std::is_same_v<T, KernelChristoffelEstimator>) {
                doc["type"] = "kernel";
                doc["kernel"] = kernel_to_json(est.kernel());
                doc["data"] = dataset_rows(est.data());
                doc["factor"] = est.n_samples() <= kStoredKernelFactorLimit ? matrix_rows(est.factor(), true)
                                                                            : json(nullptr);
            } else {
                doc["type"] = "nystrom";
                doc["kernel"] = kernel_to_json(est.kernel());
                doc["data"] = dataset_rows(est.data());
                doc["landmarks"] = est.landmarks();
                doc["factor"] = matrix_rows(est.core_factor(), true);
            }
        },
        estimate.estimator());
    return doc;
}

SupportEstimate estimate_from_json(const json& doc) {
    constexpr const char* ctx = "estimate";
    if (field<int>(doc, "format", ctx) != kFormatVersion) throw ConfigError("estimate: unsupported format version");
    const auto type = field<std::string>(doc, "type", ctx);
    const int n = field<int>(doc, "n", ctx);
    if (n < 1) throw ConfigError("estimate: n must be >= 1");
    const double sigma0_sq = field<double>(doc, "sigma0_sq", ctx);
    const double threshold = decode_double(field<json>(doc, "threshold", ctx), ctx);

    std::optional<AffineInputMap> map;
    if (doc.contains("input_map") && !doc["input_map"].is_null()) {
        const auto center = field<std::vector<double>>(doc["input_map"], "center", "estimate input_map");
        const auto scale = field<std::vector<double>>(doc["input_map"], "scale", "estimate input_map");
        map = AffineInputMap{Eigen::Map<const Eigen::VectorXd>(center.data(), static_cast<Eigen::Index>(center.size())),
                             Eigen::Map<const Eigen::VectorXd>(scale.data(), static_cast<Eigen::Index>(scale.size()))};
    }

    try {
        auto build = [&]() -> ChristoffelEstimator {
            if (type == "poly") {
                MultiIndexBasis basis(n, field<int>(doc, "m", ctx));
                Eigen::MatrixXd factor = read_lower(field<json>(doc, "factor", ctx), basis.size(), ctx);
                return PolyChristoffelEstimator(std::move(basis), sigma0_sq, field<Eigen::Index>(doc, "N", ctx),
                                                std::move(factor));
            }
            const KernelSpec kernel = kernel_from_json(field<json>(doc, "kernel", ctx));
            Dataset data = read_dataset(field<json>(doc, "data", ctx), n, ctx);
            if (type == "kernel") {
                const json& stored = field<json>(doc, "factor", ctx);
                if (stored.is_null()) {
                    return KernelChristoffelEstimator::fit(std::move(data), kernel, sigma0_sq,
                                                           std::numeric_limits<Eigen::Index>::max());
                }
                Eigen::MatrixXd factor = read_lower(stored, data.size(), ctx);
                return KernelChristoffelEstimator(std::move(data), kernel, sigma0_sq, std::move(factor));
            }
            if (type == "nystrom") {
                auto landmarks = field<std::vector<Eigen::Index>>(doc, "landmarks", ctx);
                return NystromChristoffelEstimator::fit_with_landmarks(std::move(data), kernel, sigma0_sq,
                                                                       std::move(landmarks));
            }
            throw ConfigError("estimate: unknown type '" + type + "'");
        };
        SupportEstimate estimate(build(), threshold, std::move(map));
        if (doc.contains("coordinate_names")) {
            estimate.coordinate_names = doc["coordinate_names"].get<std::vector<std::string>>();
        }
        return estimate;
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("estimate: ") + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("estimate: ") + e.what());
    }
}

json to_json(const CoverageReport& r) {
    return {{"format", kFormatVersion},   {"hits", r.hits},
            {"n", r.total},               {"coverage", r.point_estimate},
            {"lower_bound", r.lower_bound}, {"confidence_delta", r.confidence_delta}};
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace christoffel
