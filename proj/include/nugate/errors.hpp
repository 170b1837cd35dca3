#pragma once

#include <stdexcept>
#include <string>

namespace nugate {

/// Bad argument: out-of-range index, mismatched dimensions, empty grid.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A matrix that was required to be unitary is not.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The nonunitary operator maps the input state to the zero vector, so the
/// normalized target does not exist.
struct AnnihilationError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A root-finding request has no solution in the admissible interval.
struct NoRootError : std::domain_error {
    using std::domain_error::domain_error;
};

/// The requested register would exceed the configured amplitude cap.
struct SizeError : std::length_error {
    using std::length_error::length_error;
};

struct UnsupportedConfiguration : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace nugate
