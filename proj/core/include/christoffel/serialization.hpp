#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "christoffel/algorithms.hpp"
#include "christoffel/certificate.hpp"
#include "christoffel/estimators.hpp"

namespace christoffel {

inline constexpr int kFormatVersion = 1;

/// Kernel estimators with more samples than this are stored without their
/// N x N factor; loading refactorizes the stored data, which reproduces the
/// factor bit for bit because the fit is deterministic.
inline constexpr Eigen::Index kStoredKernelFactorLimit = 2000;

nlohmann::json to_json(const PacCertificate& certificate);
PacCertificate certificate_from_json(const nlohmann::json& doc);

/// Estimator, threshold, input map and coordinate names. The certificate is
/// stored separately. A non-finite threshold is written as "Infinity".
nlohmann::json to_json(const SupportEstimate& estimate);
SupportEstimate estimate_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const CoverageReport& report);

/// Pretty-printed JSON text with a trailing newline; key order is sorted so
/// output is byte-stable.
std::string dump(const nlohmann::json& doc);

}  // namespace christoffel
