#pragma once

#include <stdexcept>
#include <string>

namespace rwde {

//! Numerical failure (non-convergence, ill-conditioning, out-of-tolerance results).
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

//! A postcondition that should be unreachable for valid inputs was violated.
struct invariant_violation : std::runtime_error {
    explicit invariant_violation(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rwde
