#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace christoffel {

enum class CertificateMethod { classical, pacbayes_kernel, pacbayes_poly };

/// certified: the requested epsilon was reached. not_terminated: the
/// iteration budget ran out; the trace still certifies every listed eps_i.
enum class CertificateStatus { certified, not_terminated };

std::string_view to_string(CertificateMethod method);
std::string_view to_string(CertificateStatus status);
CertificateMethod parse_certificate_method(std::string_view text);
CertificateStatus parse_certificate_status(std::string_view text);

/// One evaluated iteration of the PAC-Bayes loop. delta_i, gamma and
/// log_term are the intermediate quantities kept for audit:
///   delta_i = 6 delta / (pi^2 i^2)
///   gamma   = (kl + ln((N+1)/delta_i)) / N
///   risk_bound = sup{b : D_ber(empirical_risk || b) <= gamma}
///   log_term = (2/N) ln(pi^2 i^2 / (6 delta))
///   epsilon = (risk_bound + log_term) / (1 - F1(1))
struct IterationRecord {
    int iteration = 0;
    std::int64_t n_samples = 0;
    double empirical_risk = 0.0;
    double kl_divergence = 0.0;
    double delta_i = 0.0;
    double gamma = 0.0;
    double risk_bound = 0.0;
    double log_term = 0.0;
    double epsilon = 0.0;

    bool operator==(const IterationRecord&) const = default;
};

struct PacCertificate {
    CertificateMethod method = CertificateMethod::classical;
    CertificateStatus status = CertificateStatus::certified;
    double epsilon = 0.0;  // requested
    double delta = 0.0;
    std::int64_t n_samples = 0;
    /// VC dimension for the classical bound; unused otherwise.
    std::optional<std::uint64_t> vc_dimension;
    std::vector<IterationRecord> trace;

    /// Epsilon actually attested: the last trace value, or the requested
    /// epsilon for a classical certificate.
    double achieved_epsilon() const;

    bool operator==(const PacCertificate&) const = default;
};

/// Recomputes epsilon from a record's own risk bound and sample count and
/// checks it against the stored value to a relative tolerance.
bool record_is_consistent(const IterationRecord& record, double delta, double rel_tol = 1e-12);

}  // namespace christoffel
