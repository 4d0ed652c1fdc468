#pragma once

#include <stdexcept>
#include <string>

namespace mixlab {

// Error taxonomy shared by every module. The CLI maps these onto exit codes:
// ConfigError/ArgumentError -> 2, NumericError/ResolutionError/DomainError -> 3.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (t <= 0, s outside (0,1], ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed call: empty lists, mismatched grids, violated preconditions on data.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Quadrature or iteration failed to converge.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Discretization too coarse (doubling check, step-halving guard, aliasing).
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// Table or field contains non-finite entries.
class DataError : public Error {
public:
    using Error::Error;
};

/// Requested kind has no analytic derivative.
class UnsupportedKindError : public Error {
public:
    using Error::Error;
};

/// Input state of a time step was not finite.
class DivergedStateError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& what)
        : Error(what + ": " + path), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace mixlab
