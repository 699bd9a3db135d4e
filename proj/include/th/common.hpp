#pragma once

#include <stdexcept>
#include <string>

namespace th {

// Bad user input (malformed tangle text, unknown algebra name, ...).
// The CLI maps this to exit code 2.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// A well-formed request that cannot be computed (e.g. NotStronglySeparable).
// The CLI maps this to exit code 1.
struct compute_error : std::runtime_error {
    explicit compute_error(const std::string& what) : std::runtime_error(what) {}
};

// Violation of an internal invariant; always a bug, never user error.
struct internal_error : std::logic_error {
    explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

} // namespace th
