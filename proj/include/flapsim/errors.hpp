#pragma once

#include <stdexcept>
#include <string>

namespace flapsim {

// Base of all library errors. Two branches map onto the CLI exit codes:
// ConfigFailure -> 2 (bad config or input data), NumericalFailure -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigFailure : Error {
    using Error::Error;
};

struct NumericalFailure : Error {
    using Error::Error;
};

// --- configuration / input data ---

struct ConfigError : ConfigFailure {
    using ConfigFailure::ConfigFailure;
};

// Malformed or empty measurement file.
struct FormatError : ConfigFailure {
    using ConfigFailure::ConfigFailure;
};

// Hole in a measurement time series larger than 5x the median sample interval.
struct GapError : ConfigFailure {
    using ConfigFailure::ConfigFailure;
};

// Less than two flap periods of common support between trace and simulation.
struct InsufficientOverlapError : ConfigFailure {
    using ConfigFailure::ConfigFailure;
};

// --- numerics ---

// A linkage loop cannot close at the requested angles (branch violation).
struct AssemblyError : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};

// Linkage constraint system lost rank (dead-point configuration).
struct SingularLinkageError : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};

// Constrained dynamics KKT system is singular.
struct SingularKKTError : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};

// Relative airspeed too small for the aerodynamic model and no floor configured.
struct DegenerateFlowError : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};

// Spanwise collocation system condition number exceeds its bound.
struct IllConditionedError : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};

// NaN/Inf appeared in the integrated state.
struct NonFiniteStateError : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};

// Wake requested from a run that logged no circulation history.
struct EmptyHistoryError : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};

}  // namespace flapsim
