#pragma once

#include <stdexcept>
#include <string>

namespace qsl {

/// Invalid input: malformed descriptions, broken invariants, out-of-domain parameters.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation that was set up correctly failed to converge or degenerated.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qsl
