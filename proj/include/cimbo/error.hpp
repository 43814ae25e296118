#pragma once

#include <stdexcept>
#include <string>

namespace cimbo {

// Bad input to an operation: out-of-range index, length mismatch, unknown level.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Covariance factorization failed even after jitter escalation.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exact hypervolume requested for more objectives than the slicing code supports.
class UnsupportedDimension : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Experiment configuration problem. line is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace cimbo
