#pragma once

#include <stdexcept>
#include <string>

namespace uclab {

// Invalid argument value (probability outside [0,1], bad quantile, ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Requested computation exceeds a built-in size guard.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation mode not applicable to the given inputs (e.g. exact enumeration
// on an infinite support).
struct ModeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A model assigned probability zero to an observed symbol / sampled path.
struct ZeroProbability : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Entropy (or a restricted entropy sum) diverges for the given distribution.
struct UnboundedEntropy : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A stated precondition failed; the message names the offending input.
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace uclab
