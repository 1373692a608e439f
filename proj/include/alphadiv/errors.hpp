#pragma once

#include <stdexcept>

namespace alphadiv {

/// Base class for all recoverable library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// measure construction and manipulation
struct LengthMismatch : Error { using Error::Error; };
struct WeightSumInvalid : Error { using Error::Error; };
struct NegativeWeight : Error { using Error::Error; };
struct NonFinitePoint : Error { using Error::Error; };
struct TOutOfRange : Error { using Error::Error; };

// divergence orders
struct InvalidOrder : Error { using Error::Error; };

// moment-constrained bounds
struct EqualMeans : Error { using Error::Error; };

// relation checks
struct InfiniteDivergence : Error { using Error::Error; };
struct StepTooLarge : Error { using Error::Error; };
struct QuadratureNonConvergence : Error { using Error::Error; };
struct DegeneratePath : Error { using Error::Error; };

// brute-force oracle
struct SingularSystem : Error { using Error::Error; };
struct NoFeasiblePoint : Error { using Error::Error; };
struct DeltaInvalid : Error { using Error::Error; };
struct ScanFailed : Error { using Error::Error; };
struct JTooSmall : Error { using Error::Error; };

/// An evaluator broke one of its own postconditions. Signals a bug in the
/// library, never bad user input.
struct InternalConsistency : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace alphadiv
