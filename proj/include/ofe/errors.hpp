#pragma once

#include <stdexcept>
#include <string>

namespace ofe {

// Iterative solver failed to reach its tolerance within the iteration budget.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Propagation produced a non-finite or norm-growing state.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameters are mutually unidentifiable from the supplied data.
struct DegeneracyError : FitError {
    using FitError::FitError;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A sampling grid is too coarse for the feature it has to resolve.
struct SamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ofe
