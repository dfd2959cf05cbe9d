#pragma once

#include <stdexcept>
#include <string>

namespace pshvol {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct DegreeOverflow : Error { using Error::Error; };
struct ZeroReference : Error { using Error::Error; };
struct NotUnit : Error { using Error::Error; };
struct DegreeCapExceeded : Error { using Error::Error; };
struct ZeroBidegree : Error { using Error::Error; };
struct NotPseudoconvex : Error { using Error::Error; };
struct RouteMismatch : Error { using Error::Error; };
struct SingularReebSolve : Error { using Error::Error; };
struct FlowStepUnstable : Error { using Error::Error; };
struct NotConvexAt : Error { using Error::Error; };
struct NotUnimodular : Error { using Error::Error; };
struct NonFiniteSample : Error { using Error::Error; };
struct NotKahler : Error { using Error::Error; };
struct ZeroVolumeElement : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace pshvol
