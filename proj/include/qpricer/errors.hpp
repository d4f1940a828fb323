#pragma once

#include <stdexcept>
#include <string>

namespace qpricer {

/// Invalid market data, product definition, or run configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure inside the pricing engine (non-finite values, broken brackets).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qpricer
