#pragma once

#include <stdexcept>
#include <string>

namespace kroots {

/// Malformed or out-of-contract input (bad exponent lengths, duplicate terms, ...).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input is well formed but the requested configuration is not implemented
/// (e.g. exact hulls above dimension 3).
class UnsupportedError : public std::runtime_error {
public:
    explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

/// The requested quantity is mathematically undefined for this input.
class UndefinedError : public std::domain_error {
public:
    explicit UndefinedError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace kroots
