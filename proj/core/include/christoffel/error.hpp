#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace christoffel {

/// Precondition violations: bad dimensions, out-of-range parameters.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Integer results that do not fit the representable range.
class RangeError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

/// Factorization or other floating-point failures. `stage()` names the
/// computation that failed (e.g. "moment matrix cholesky").
class NumericError : public std::runtime_error {
public:
    NumericError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// A requested matrix would exceed the configured memory budget.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite state during ODE integration. `sample()` is the index of the
/// sample being generated, or -1 when integrating outside a sampler.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(std::size_t step, const std::string& what, long long sample = -1)
        : std::runtime_error(what + " (step " + std::to_string(step) +
                             (sample >= 0 ? ", sample " + std::to_string(sample) : std::string()) + ")"),
          step_(step),
          sample_(sample),
          detail_(what) {}

    std::size_t step() const noexcept { return step_; }
    long long sample() const noexcept { return sample_; }
    IntegrationError at_sample(long long sample) const { return IntegrationError(step_, detail_, sample); }

private:
    std::size_t step_;
    long long sample_;
    std::string detail_;
};

/// Malformed configuration documents.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace christoffel
