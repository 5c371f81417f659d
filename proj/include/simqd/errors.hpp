#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace simqd {

// Argument outside the mathematical domain of an operation (negative frequency, T < 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Lookup outside a tabulated range.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Quadrature or iteration that did not reach its tolerance.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double error_estimate)
        : std::runtime_error(what), error_estimate_(error_estimate) {}
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double error_estimate_;
};

// Fock-space truncation too small for the requested coherent state.
class PrecisionError : public std::runtime_error {
public:
    PrecisionError(const std::string& what, double deficit)
        : std::runtime_error(what), deficit_(deficit) {}
    double deficit() const noexcept { return deficit_; }

private:
    double deficit_;
};

// Invalid configuration; `path` names the offending field, e.g. "temperatures[0]".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace simqd
