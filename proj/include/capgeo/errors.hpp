#pragma once

#include <stdexcept>
#include <string>

namespace capgeo {

// Base class for every failure this library reports. Subclasses carry the
// failure kind in the type so call sites can catch what they can handle.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Chart construction / evaluation.
struct InvalidChart : Error { using Error::Error; };
struct TipSingularity : Error { using Error::Error; };
struct NonFiniteCurvature : Error { using Error::Error; };
struct NotOnBoundary : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };

// Geodesic tracing.
struct LeftChart : Error { using Error::Error; };
struct StepUnderflow : Error { using Error::Error; };

// Domains and curves.
struct InvalidTheta : Error { using Error::Error; };
struct InvalidDomain : Error { using Error::Error; };
struct NoEndpoints : Error { using Error::Error; };
struct DegenerateTangent : Error { using Error::Error; };
struct EmptyCurve : Error { using Error::Error; };

// Flow.
struct StepTooLarge : Error { using Error::Error; };
struct EmbeddednessLost : Error { using Error::Error; };

// Searches.
struct NoArrival : Error { using Error::Error; };
struct NoneFound : Error { using Error::Error; };
struct ResidualTooLarge : Error { using Error::Error; };

// Sweepouts.
struct RowHasSentinel : Error { using Error::Error; };
struct DegreeCheckFailed : Error { using Error::Error; };
struct ContinuityCheckFailed : Error { using Error::Error; };

// Cone development.
struct LeavesConeRegion : Error { using Error::Error; };
struct BlendFailure : Error { using Error::Error; };

// CLI.
struct ConfigError : Error { using Error::Error; };

}  // namespace capgeo
