#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace regretlab {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// An integrand or objective returned NaN/Inf at an evaluation point.
class NonFiniteError : public Error {
public:
    NonFiniteError(const std::string& where, double at)
        : Error(where + ": non-finite value at x=" + std::to_string(at)), at_(at) {}
    double at() const { return at_; }

private:
    double at_ = 0.0;
};

// Adaptive quadrature ran out of subdivisions before meeting tolerance.
class NoConvergenceError : public Error {
public:
    using Error::Error;
};

class BadBracketError : public Error {
public:
    using Error::Error;
};

class InvalidGainError : public Error {
public:
    using Error::Error;
};

class NotZeroMeanError : public Error {
public:
    using Error::Error;
};

class DegeneratePriorError : public Error {
public:
    using Error::Error;
};

class DegenerateFisherError : public Error {
public:
    using Error::Error;
};

// The moment estimator would leave the parameter space (a > 0). Carries the
// value the estimate would have been clamped to.
class DegenerateSampleError : public Error {
public:
    DegenerateSampleError(const std::string& what, double clamped)
        : Error(what), clamped_(clamped) {}
    double clamped_value() const { return clamped_; }

private:
    double clamped_ = 0.0;
};

class MinimumAtBoundaryError : public Error {
public:
    using Error::Error;
};

// Config validation failure with per-field diagnostics.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::vector<std::string> diagnostics)
        : Error(what), diagnostics_(std::move(diagnostics)) {}
    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

} // namespace regretlab
