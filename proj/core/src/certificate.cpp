#include "christoffel/certificate.hpp"

#include <cmath>
#include <string>

#include "christoffel/bounds.hpp"
#include "christoffel/error.hpp"

namespace christoffel {

std::string_view to_string(CertificateMethod method) {
    switch (method) {
        case CertificateMethod::classical: return "classical";
        case CertificateMethod::pacbayes_kernel: return "pacbayes_kernel";
        case CertificateMethod::pacbayes_poly: return "pacbayes_poly";
    }
    return "classical";
}

std::string_view to_string(CertificateStatus status) {
    return status == CertificateStatus::certified ? "certified" : "not_terminated";
}

CertificateMethod parse_certificate_method(std::string_view text) {
    if (text == "classical") return CertificateMethod::classical;
    if (text == "pacbayes_kernel") return CertificateMethod::pacbayes_kernel;
    if (text == "pacbayes_poly") return CertificateMethod::pacbayes_poly;
    throw ArgumentError("unknown certificate method '" + std::string(text) + "'");
}

CertificateStatus parse_certificate_status(std::string_view text) {
    if (text == "certified") return CertificateStatus::certified;
    if (text == "not_terminated") return CertificateStatus::not_terminated;
    throw ArgumentError("unknown certificate status '" + std::string(text) + "'");
}

double PacCertificate::achieved_epsilon() const { return trace.empty() ? epsilon : trace.back().epsilon; }

bool record_is_consistent(const IterationRecord& record, double delta, double rel_tol) {
    const double expected = epsilon_schedule(record.risk_bound, record.n_samples, record.iteration, delta);
    return std::abs(expected - record.epsilon) <= rel_tol * std::abs(expected);
}

}  // namespace christoffel
