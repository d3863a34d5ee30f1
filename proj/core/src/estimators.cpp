#include "christoffel/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "christoffel/error.hpp"
#include "christoffel/linalg.hpp"
#include "christoffel/random.hpp"

namespace christoffel {

namespace {

constexpr Eigen::Index kEvalChunk = 2048;

void require_finite(const Dataset& data, const char* stage) {
    if (data.empty()) throw ArgumentError(std::string(stage) + ": dataset is empty");
    const Eigen::Index bad = data.first_non_finite();
    if (bad >= 0) throw NumericError(stage, "sample " + std::to_string(bad) + " has a non-finite coordinate");
}

void require_ridge(double sigma0_sq) {
    if (!(sigma0_sq > 0.0) || !std::isfinite(sigma0_sq)) throw ArgumentError("sigma0_sq must be positive and finite");
}

void require_dim(std::size_t got, int want) {
    if (got != static_cast<std::size_t>(want)) {
        throw ArgumentError("query dimension " + std::to_string(got) + " does not match estimator dimension " +
                            std::to_string(want));
    }
}

Dataset rows(const Dataset& data, Eigen::Index first, Eigen::Index count) {
    return Dataset(PointMatrix(data.matrix().middleRows(first, count)));
}

}  // namespace

// Polynomial estimator ---------------------------------------------------

PolyChristoffelEstimator PolyChristoffelEstimator::fit(const Dataset& data, MultiIndexBasis basis, double sigma0_sq) {
    require_ridge(sigma0_sq);
    if (data.dim() != basis.n()) throw ArgumentError("fit_poly: data dimension does not match basis");
    require_finite(data, "moment matrix accumulation");

    const Eigen::Index d = basis.size();
    const Eigen::Index n = data.size();
    Eigen::MatrixXd moment = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd z(d, std::min(n, kEvalChunk));
    for (Eigen::Index first = 0; first < n; first += kEvalChunk) {
        const Eigen::Index count = std::min(kEvalChunk, n - first);
        for (Eigen::Index i = 0; i < count; ++i) basis.evaluate_into(data.point(first + i), z.col(i));
        moment.selfadjointView<Eigen::Lower>().rankUpdate(z.leftCols(count));
    }
    moment /= static_cast<double>(n);
    moment.diagonal().array() += sigma0_sq;
    moment.triangularView<Eigen::StrictlyUpper>() = moment.transpose();

    PolyChristoffelEstimator est;
    est.basis_ = std::move(basis);
    est.sigma0_sq_ = sigma0_sq;
    est.n_samples_ = n;
    est.jitter_ = linalg::cholesky_in_place(moment, "moment matrix cholesky");
    est.factor_ = std::move(moment);
    return est;
}

PolyChristoffelEstimator::PolyChristoffelEstimator(MultiIndexBasis basis, double sigma0_sq, Eigen::Index n_samples,
                                                   Eigen::MatrixXd factor)
    : basis_(std::move(basis)), sigma0_sq_(sigma0_sq), n_samples_(n_samples), factor_(std::move(factor)) {
    require_ridge(sigma0_sq);
    if (factor_.rows() != basis_.size() || factor_.cols() != basis_.size()) {
        throw ArgumentError("polynomial estimator: factor size does not match basis dimension");
    }
}

double PolyChristoffelEstimator::operator()(std::span<const double> x) const {
    require_dim(x.size(), basis_.n());
    Eigen::VectorXd z = basis_.evaluate(x);
    factor_.triangularView<Eigen::Lower>().solveInPlace(z);
    return z.squaredNorm();
}

Eigen::VectorXd PolyChristoffelEstimator::evaluate(const Dataset& points) const {
    if (points.empty()) return {};
    require_dim(static_cast<std::size_t>(points.dim()), basis_.n());
    // Same vector solve as the pointwise path, so a threshold taken from
    // batch values classifies those points identically one at a time.
    Eigen::VectorXd out(points.size());
    Eigen::VectorXd z(basis_.size());
    for (Eigen::Index i = 0; i < points.size(); ++i) {
        basis_.evaluate_into(points.point(i), z);
        factor_.triangularView<Eigen::Lower>().solveInPlace(z);
        out[i] = z.squaredNorm();
    }
    return out;
}

Eigen::MatrixXd PolyChristoffelEstimator::moment_matrix() const {
    return factor_.triangularView<Eigen::Lower>() * factor_.transpose();
}

// Kernel estimator -------------------------------------------------------

KernelChristoffelEstimator KernelChristoffelEstimator::fit(Dataset data, KernelSpec kernel, double sigma0_sq,
                                                           Eigen::Index gram_capacity) {
    require_ridge(sigma0_sq);
    if (data.size() > gram_capacity) {
        throw CapacityError("kernel estimator: N = " + std::to_string(data.size()) +
                            " exceeds the Gramian capacity of " + std::to_string(gram_capacity) +
                            "; use the Nystrom estimator (kl_mode spectral_truncated with nystrom evaluation)");
    }
    require_finite(data, "gram cholesky");
    Eigen::MatrixXd gram = kernel.gram(data);
    return fit_from_gram(std::move(data), std::move(kernel), sigma0_sq, std::move(gram));
}

KernelChristoffelEstimator KernelChristoffelEstimator::fit_from_gram(Dataset data, KernelSpec kernel, double sigma0_sq,
                                                                     Eigen::MatrixXd&& gram) {
    require_ridge(sigma0_sq);
    require_finite(data, "gram cholesky");
    if (gram.rows() != data.size() || gram.cols() != data.size()) {
        throw ArgumentError("kernel estimator: Gramian size does not match data");
    }
    KernelChristoffelEstimator est(std::move(data), std::move(kernel), sigma0_sq);
    gram.diagonal().array() += sigma0_sq;
    est.jitter_ = linalg::cholesky_in_place(gram, "gram cholesky");
    est.factor_ = std::move(gram);
    return est;
}

KernelChristoffelEstimator::KernelChristoffelEstimator(Dataset data, KernelSpec kernel, double sigma0_sq,
                                                       Eigen::MatrixXd factor)
    : data_(std::move(data)), kernel_(std::move(kernel)), sigma0_sq_(sigma0_sq), factor_(std::move(factor)) {
    require_ridge(sigma0_sq);
    if (factor_.rows() != data_.size() || factor_.cols() != data_.size()) {
        throw ArgumentError("kernel estimator: factor size does not match data");
    }
}

double KernelChristoffelEstimator::operator()(std::span<const double> x) const {
    require_dim(x.size(), data_.dim());
    Eigen::VectorXd k = kernel_.column(data_, x);
    factor_.triangularView<Eigen::Lower>().solveInPlace(k);
    return std::max(0.0, kernel_.diagonal(x) - k.squaredNorm());
}

Eigen::VectorXd KernelChristoffelEstimator::evaluate(const Dataset& points) const {
    if (points.empty()) return {};
    require_dim(static_cast<std::size_t>(points.dim()), data_.dim());
    constexpr Eigen::Index chunk = 256;
    Eigen::VectorXd out(points.size());
    for (Eigen::Index first = 0; first < points.size(); first += chunk) {
        const Eigen::Index count = std::min(chunk, points.size() - first);
        Eigen::MatrixXd k = kernel_.cross(data_, rows(points, first, count));
        factor_.triangularView<Eigen::Lower>().solveInPlace(k);
        for (Eigen::Index i = 0; i < count; ++i) {
            out[first + i] = std::max(0.0, kernel_.diagonal(points.point(first + i)) - k.col(i).squaredNorm());
        }
    }
    return out;
}

Eigen::VectorXd KernelChristoffelEstimator::training_values() const {
    // With A = s I + K and k_i = A e_i - s e_i:
    // k(x_i,x_i) - k_i^T A^-1 k_i = s - s^2 [A^-1]_ii.
    const double ridge = sigma0_sq_ + jitter_;
    const Eigen::VectorXd inv_diag = linalg::inverse_diagonal(factor_);
    return (ridge * (1.0 - ridge * inv_diag.array())).max(0.0).matrix();
}

// Nystrom estimator ------------------------------------------------------

std::vector<Eigen::Index> select_landmarks(Eigen::Index n, Eigen::Index r, LandmarkSelection selection) {
    if (r < 1 || r > n) throw ArgumentError("landmark count must satisfy 1 <= r <= N");
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    if (selection.rule == LandmarkRule::uniform_random) {
        std::mt19937_64 gen(mix64(selection.seed));
        for (Eigen::Index i = 0; i < r; ++i) {
            const auto j = i + static_cast<Eigen::Index>(uniform_below(gen, static_cast<std::uint64_t>(n - i)));
            std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        }
    }
    idx.resize(static_cast<std::size_t>(r));
    std::sort(idx.begin(), idx.end());
    return idx;
}

NystromChristoffelEstimator::NystromChristoffelEstimator(Dataset data, KernelSpec kernel, double sigma0_sq,
                                                         std::vector<Eigen::Index> landmarks)
    : data_(std::move(data)), kernel_(std::move(kernel)), sigma0_sq_(sigma0_sq), landmarks_(std::move(landmarks)) {
    require_ridge(sigma0_sq);
    require_finite(data_, "nystrom core cholesky");
    const Eigen::Index r = static_cast<Eigen::Index>(landmarks_.size());
    if (r < 1 || r > data_.size()) throw ArgumentError("landmark count must satisfy 1 <= r <= N");
    std::vector<Eigen::Index> sorted = landmarks_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.front() < 0 ||
        sorted.back() >= data_.size()) {
        throw ArgumentError("landmark indices must be distinct and within the dataset");
    }

    PointMatrix landmark_points(r, data_.dim());
    for (Eigen::Index j = 0; j < r; ++j) landmark_points.row(j) = data_.matrix().row(landmarks_[static_cast<std::size_t>(j)]);
    cross_ = kernel_.cross(data_, Dataset(std::move(landmark_points)));

    // K_rr^-1/2 on its numerically nonzero spectrum. Substituting B = K_Nr W
    // turns the core into sigma0^2 I + B^T B, whose spectrum is bounded below
    // by sigma0^2; the raw sigma0^2 K_rr + K_rN K_Nr is as ill-conditioned as
    // K_rr and loses ~8 digits on smooth kernels.
    Eigen::MatrixXd k_rr(r, r);
    for (Eigen::Index j = 0; j < r; ++j) k_rr.row(j) = cross_.row(landmarks_[static_cast<std::size_t>(j)]);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k_rr);
    if (eig.info() != Eigen::Success) throw NumericError("nystrom landmark eigensolve", "eigensolver failed");
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double cutoff = static_cast<double>(r) * std::numeric_limits<double>::epsilon() *
                          std::max(lambda[r - 1], std::numeric_limits<double>::min());
    Eigen::Index first = 0;
    while (first < r && lambda[first] <= cutoff) ++first;
    const Eigen::Index kept = r - first;
    if (kept == 0) throw NumericError("nystrom landmark eigensolve", "landmark kernel matrix is zero");
    whiten_ = eig.eigenvectors().rightCols(kept) *
              lambda.tail(kept).cwiseSqrt().cwiseInverse().asDiagonal();

    const Eigen::MatrixXd basis = cross_ * whiten_;
    Eigen::MatrixXd core = Eigen::MatrixXd::Identity(kept, kept) * sigma0_sq_;
    core.selfadjointView<Eigen::Lower>().rankUpdate(basis.transpose());
    core.triangularView<Eigen::StrictlyUpper>() = core.transpose();
    jitter_ = linalg::cholesky_in_place(core, "nystrom core cholesky");
    core_factor_ = std::move(core);
}

NystromChristoffelEstimator NystromChristoffelEstimator::fit(Dataset data, KernelSpec kernel, double sigma0_sq,
                                                             Eigen::Index rank, LandmarkSelection selection) {
    auto landmarks = select_landmarks(data.size(), rank, selection);
    return NystromChristoffelEstimator(std::move(data), std::move(kernel), sigma0_sq, std::move(landmarks));
}

NystromChristoffelEstimator NystromChristoffelEstimator::fit_with_landmarks(Dataset data, KernelSpec kernel,
                                                                            double sigma0_sq,
                                                                            std::vector<Eigen::Index> landmarks) {
    return NystromChristoffelEstimator(std::move(data), std::move(kernel), sigma0_sq, std::move(landmarks));
}

NystromChristoffelEstimator::NystromChristoffelEstimator(const NystromChristoffelEstimator& other)
    : data_(other.data_),
      kernel_(other.kernel_),
      sigma0_sq_(other.sigma0_sq_),
      landmarks_(other.landmarks_),
      cross_(other.cross_),
      whiten_(other.whiten_),
      core_factor_(other.core_factor_),
      jitter_(other.jitter_),
      clamped_(std::make_unique<std::atomic<std::uint64_t>>(other.clamped_count())) {}

NystromChristoffelEstimator& NystromChristoffelEstimator::operator=(const NystromChristoffelEstimator& other) {
    if (this != &other) *this = NystromChristoffelEstimator(other);
    return *this;
}

double NystromChristoffelEstimator::finish(double diag, const Eigen::VectorXd& k_data) const {
    Eigen::VectorXd projected = whiten_.transpose() * (cross_.transpose() * k_data);
    core_factor_.triangularView<Eigen::Lower>().solveInPlace(projected);
    const double value = diag - (k_data.squaredNorm() - projected.squaredNorm()) / sigma0_sq_;
    if (value < 0.0) {
        clamped_->fetch_add(1, std::memory_order_relaxed);
        return 0.0;
    }
    return value;
}

double NystromChristoffelEstimator::operator()(std::span<const double> x) const {
    require_dim(x.size(), data_.dim());
    return finish(kernel_.diagonal(x), kernel_.column(data_, x));
}

Eigen::VectorXd NystromChristoffelEstimator::evaluate(const Dataset& points) const {
    if (points.empty()) return {};
    require_dim(static_cast<std::size_t>(points.dim()), data_.dim());
    constexpr Eigen::Index chunk = 256;
    Eigen::VectorXd out(points.size());
    for (Eigen::Index first = 0; first < points.size(); first += chunk) {
        const Eigen::Index count = std::min(chunk, points.size() - first);
        const Eigen::MatrixXd k = kernel_.cross(data_, rows(points, first, count));
        for (Eigen::Index i = 0; i < count; ++i) {
            out[first + i] = finish(kernel_.diagonal(points.point(first + i)), k.col(i));
        }
    }
    return out;
}

// Support estimate ---------------------------------------------------------

AffineInputMap AffineInputMap::identity(int dim) {
    return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

bool AffineInputMap::is_identity() const {
    return (center.array() == 0.0).all() && (scale.array() == 1.0).all();
}

Eigen::VectorXd AffineInputMap::apply(std::span<const double> x) const {
    require_dim(x.size(), dim());
    Eigen::VectorXd out(dim());
    for (int i = 0; i < dim(); ++i) out[i] = (x[static_cast<std::size_t>(i)] - center[i]) / scale[i];
    return out;
}

Dataset AffineInputMap::apply(const Dataset& data) const {
    require_dim(static_cast<std::size_t>(data.dim()), dim());
    PointMatrix out = data.matrix();
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        out.row(i) = ((out.row(i).transpose() - center).array() / scale.array()).matrix().transpose();
    }
    return Dataset(std::move(out));
}

namespace {

int estimator_dim(const ChristoffelEstimator& est) {
    return std::visit([](const auto& e) { return e.dim(); }, est);
}

}  // namespace

SupportEstimate::SupportEstimate(ChristoffelEstimator estimator, double threshold,
                                 std::optional<AffineInputMap> input_map, std::optional<PacCertificate> certificate)
    : estimator_(std::move(estimator)),
      threshold_(threshold),
      input_map_(std::move(input_map)),
      certificate_(std::move(certificate)) {
    if (std::isnan(threshold_) || threshold_ < 0.0) throw ArgumentError("threshold must be >= 0");
    if (input_map_) {
        if (input_map_->dim() != estimator_dim(estimator_) || input_map_->scale.size() != input_map_->center.size()) {
            throw ArgumentError("input map dimension does not match estimator");
        }
        if (!(input_map_->scale.array() > 0.0).all() || !input_map_->center.allFinite() ||
            !input_map_->scale.allFinite()) {
            throw ArgumentError("input map scales must be positive and finite");
        }
    }
}

int SupportEstimate::dim() const { return estimator_dim(estimator_); }

double SupportEstimate::value(std::span<const double> x) const {
    if (input_map_) {
        const Eigen::VectorXd mapped = input_map_->apply(x);
        return std::visit([&](const auto& e) { return e(std::span<const double>(mapped.data(), mapped.size())); },
                          estimator_);
    }
    return std::visit([&](const auto& e) { return e(x); }, estimator_);
}

Eigen::VectorXd SupportEstimate::values(const Dataset& points) const {
    if (input_map_) {
        const Dataset mapped = input_map_->apply(points);
        return std::visit([&](const auto& e) { return e.evaluate(mapped); }, estimator_);
    }
    return std::visit([&](const auto& e) { return e.evaluate(points); }, estimator_);
}

}  // namespace christoffel
