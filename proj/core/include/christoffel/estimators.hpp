#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "christoffel/certificate.hpp"
#include "christoffel/dataset.hpp"
#include "christoffel/kernels.hpp"
#include "christoffel/polybasis.hpp"

namespace christoffel {

/// Largest N for which a dense N x N Gramian is formed (about 3.2 GB).
inline constexpr Eigen::Index kDefaultGramCapacity = 20000;

/// x -> z_m(x)^T M^-1 z_m(x) with M = sigma0^2 I + (1/N) sum z_m(x_i) z_m(x_i)^T.
///
/// Only the d x d Cholesky factor of M is kept; evaluation is one triangular
/// solve. Immutable after construction.
class PolyChristoffelEstimator {
public:
    /// Throws NumericError on non-finite data or a factorization failure.
    static PolyChristoffelEstimator fit(const Dataset& data, MultiIndexBasis basis, double sigma0_sq);

    /// Rebuilds an estimator from a stored lower-triangular factor.
    PolyChristoffelEstimator(MultiIndexBasis basis, double sigma0_sq, Eigen::Index n_samples, Eigen::MatrixXd factor);

    double operator()(std::span<const double> x) const;
    Eigen::VectorXd evaluate(const Dataset& points) const;

    const MultiIndexBasis& basis() const noexcept { return basis_; }
    double sigma0_sq() const noexcept { return sigma0_sq_; }
    Eigen::Index n_samples() const noexcept { return n_samples_; }
    int dim() const noexcept { return basis_.n(); }
    /// Lower-triangular L with L L^T equal to the (possibly jittered) moment matrix.
    const Eigen::MatrixXd& factor() const noexcept { return factor_; }
    Eigen::MatrixXd moment_matrix() const;
    /// Diagonal jitter added by the factorization retry, 0 normally.
    double jitter() const noexcept { return jitter_; }

private:
    PolyChristoffelEstimator() = default;

    MultiIndexBasis basis_{1, 0};
    double sigma0_sq_ = 0.0;
    Eigen::Index n_samples_ = 0;
    Eigen::MatrixXd factor_;
    double jitter_ = 0.0;
};

/// x -> k(x,x) - k_D(x)^T (sigma0^2 I + K)^-1 k_D(x), the zero-observation
/// GP posterior variance. Keeps the training data and the N x N factor.
class KernelChristoffelEstimator {
public:
    /// Throws CapacityError when data.size() > gram_capacity.
    static KernelChristoffelEstimator fit(Dataset data, KernelSpec kernel, double sigma0_sq,
                                          Eigen::Index gram_capacity = kDefaultGramCapacity);

    /// Takes ownership of a precomputed Gramian (both triangles) and
    /// factorizes it in place, so callers can reuse K before the fit
    /// without holding two N x N matrices.
    static KernelChristoffelEstimator fit_from_gram(Dataset data, KernelSpec kernel, double sigma0_sq,
                                                    Eigen::MatrixXd&& gram);

    /// Rebuilds an estimator from a stored lower-triangular factor of sigma0^2 I + K.
    KernelChristoffelEstimator(Dataset data, KernelSpec kernel, double sigma0_sq, Eigen::MatrixXd factor);

    double operator()(std::span<const double> x) const;
    Eigen::VectorXd evaluate(const Dataset& points) const;
    /// Values at the training points, s (1 - s [A^-1]_ii) for A = s I + K,
    /// from the diagonal of A^-1 (about N^3/3 flops, no per-point solves).
    Eigen::VectorXd training_values() const;

    const Dataset& data() const noexcept { return data_; }
    const KernelSpec& kernel() const noexcept { return kernel_; }
    double sigma0_sq() const noexcept { return sigma0_sq_; }
    Eigen::Index n_samples() const noexcept { return data_.size(); }
    int dim() const noexcept { return data_.dim(); }
    const Eigen::MatrixXd& factor() const noexcept { return factor_; }
    double jitter() const noexcept { return jitter_; }

private:
    KernelChristoffelEstimator(Dataset data, KernelSpec kernel, double sigma0_sq)
        : data_(std::move(data)), kernel_(std::move(kernel)), sigma0_sq_(sigma0_sq) {}

    Dataset data_;
    KernelSpec kernel_;
    double sigma0_sq_;
    Eigen::MatrixXd factor_;
    double jitter_ = 0.0;
};

enum class LandmarkRule { first_r, uniform_random };

struct LandmarkSelection {
    LandmarkRule rule = LandmarkRule::uniform_random;
    std::uint64_t seed = 0;
};

/// Sorted landmark indices into [0, n) per the rule (uniform draws are
/// without replacement).
std::vector<Eigen::Index> select_landmarks(Eigen::Index n, Eigen::Index r, LandmarkSelection selection);

/// Kernel estimator with K replaced by K_Nr K_rr^+ K_rN, evaluated in
/// Woodbury form. With W = K_rr^-1/2 (pseudo-inverse root) and B = K_Nr W the
/// factored core is sigma0^2 I + B^T B, congruent to sigma0^2 K_rr + K_rN K_Nr
/// but well conditioned. Memory is O(N r). Values that round below zero are
/// clamped and counted.
class NystromChristoffelEstimator {
public:
    static NystromChristoffelEstimator fit(Dataset data, KernelSpec kernel, double sigma0_sq, Eigen::Index rank,
                                           LandmarkSelection selection);
    static NystromChristoffelEstimator fit_with_landmarks(Dataset data, KernelSpec kernel, double sigma0_sq,
                                                          std::vector<Eigen::Index> landmarks);

    NystromChristoffelEstimator(const NystromChristoffelEstimator& other);
    NystromChristoffelEstimator(NystromChristoffelEstimator&&) noexcept = default;
    NystromChristoffelEstimator& operator=(const NystromChristoffelEstimator& other);
    NystromChristoffelEstimator& operator=(NystromChristoffelEstimator&&) noexcept = default;

    double operator()(std::span<const double> x) const;
    Eigen::VectorXd evaluate(const Dataset& points) const;

    const Dataset& data() const noexcept { return data_; }
    const KernelSpec& kernel() const noexcept { return kernel_; }
    double sigma0_sq() const noexcept { return sigma0_sq_; }
    Eigen::Index n_samples() const noexcept { return data_.size(); }
    int dim() const noexcept { return data_.dim(); }
    const std::vector<Eigen::Index>& landmarks() const noexcept { return landmarks_; }
    /// Lower Cholesky factor of sigma0^2 I + B^T B.
    const Eigen::MatrixXd& core_factor() const noexcept { return core_factor_; }
    /// Number of landmark eigendirections kept (the Nystrom rank actually used).
    Eigen::Index effective_rank() const noexcept { return whiten_.cols(); }
    double jitter() const noexcept { return jitter_; }
    /// Number of evaluations clamped from a negative round-off value to 0.
    std::uint64_t clamped_count() const noexcept { return clamped_->load(std::memory_order_relaxed); }

private:
    NystromChristoffelEstimator(Dataset data, KernelSpec kernel, double sigma0_sq, std::vector<Eigen::Index> landmarks);
    double finish(double diag, const Eigen::VectorXd& k_data) const;

    Dataset data_;
    KernelSpec kernel_;
    double sigma0_sq_;
    std::vector<Eigen::Index> landmarks_;
    Eigen::MatrixXd cross_;  // K_Nr
    Eigen::MatrixXd whiten_;  // r x kept
    Eigen::MatrixXd core_factor_;
    double jitter_ = 0.0;
    std::unique_ptr<std::atomic<std::uint64_t>> clamped_ = std::make_unique<std::atomic<std::uint64_t>>(0);
};

using ChristoffelEstimator =
    std::variant<PolyChristoffelEstimator, KernelChristoffelEstimator, NystromChristoffelEstimator>;

/// Fixed affine change of coordinates x -> (x - center) / scale applied to
/// inputs before the estimator sees them. Chosen before sampling, so it does
/// not interact with any certificate.
struct AffineInputMap {
    Eigen::VectorXd center;
    Eigen::VectorXd scale;

    static AffineInputMap identity(int dim);
    int dim() const noexcept { return static_cast<int>(center.size()); }
    bool is_identity() const;
    Eigen::VectorXd apply(std::span<const double> x) const;
    Dataset apply(const Dataset& data) const;
};

/// The set {x : value(x) <= threshold}. The threshold may be 0 or +inf.
class SupportEstimate {
public:
    SupportEstimate(ChristoffelEstimator estimator, double threshold, std::optional<AffineInputMap> input_map = {},
                    std::optional<PacCertificate> certificate = {});

    int dim() const;
    double threshold() const noexcept { return threshold_; }
    const ChristoffelEstimator& estimator() const noexcept { return estimator_; }
    const std::optional<AffineInputMap>& input_map() const noexcept { return input_map_; }
    const std::optional<PacCertificate>& certificate() const noexcept { return certificate_; }
    void set_certificate(PacCertificate certificate) { certificate_ = std::move(certificate); }

    /// Estimator value at x given in original (unmapped) coordinates.
    double value(std::span<const double> x) const;
    Eigen::VectorXd values(const Dataset& points) const;
    bool contains(std::span<const double> x) const { return value(x) <= threshold_; }

    std::vector<std::string> coordinate_names;

private:
    ChristoffelEstimator estimator_;
    double threshold_;
    std::optional<AffineInputMap> input_map_;
    std::optional<PacCertificate> certificate_;
};

/// Equality at the threshold counts as inside.
inline bool membership(const SupportEstimate& estimate, std::span<const double> x) { return estimate.contains(x); }

}  // namespace christoffel
