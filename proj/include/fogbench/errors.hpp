#pragma once

#include <stdexcept>
#include <string>

namespace fogbench {

/// File or stream failure (missing input, unwritable output, bad format framing).
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure surfaced to the caller (e.g. a non-convergent fit under --strict).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fogbench
