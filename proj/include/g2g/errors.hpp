#pragma once

#include <stdexcept>
#include <string>

namespace g2g {

// Base for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// graph construction / queries
struct CycleDetected : Error { using Error::Error; };
struct SelfLoop : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct DuplicateEdge : Error { using Error::Error; };

// data handling
struct ZeroVariance : Error { using Error::Error; };
struct RaggedRows : Error { using Error::Error; };
struct NonNumericCell : Error { using Error::Error; };
struct EmptyFile : Error { using Error::Error; };
struct NTooLarge : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// conditional-independence tests
struct SampleTooSmall : Error { using Error::Error; };
struct SingularCorrelation : Error { using Error::Error; };
struct DegenerateColumn : Error { using Error::Error; };
struct NoData : Error { using Error::Error; };
struct SpecificityViolated : Error { using Error::Error; };

// expert input
struct UnknownVariableName : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

// oracles / experiments
struct TooLarge : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace g2g
