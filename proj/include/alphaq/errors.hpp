#pragma once

#include <stdexcept>
#include <string>

namespace alphaq {

// Base class for every error the library raises. Subclasses carry the
// condition name in the type so callers can catch narrowly; the message
// carries the offending values.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error { using Error::Error; };
struct SingularDesign : Error { using Error::Error; };
struct DegenerateIntercept : Error { using Error::Error; };
struct ZeroResidualVariance : Error { using Error::Error; };
struct MomentUndefined : Error { using Error::Error; };
struct Nonconvergent : Error { using Error::Error; };
struct Overflow : Error { using Error::Error; };
struct InvalidCorrelation : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct NonpositiveVariance : Error { using Error::Error; };
struct TooFewAssets : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct SingularSAR : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct MissingColumn : Error { using Error::Error; };
struct UnexpectedColumn : Error { using Error::Error; };
struct CalendarMismatch : Error { using Error::Error; };
struct NoEvaluableWindows : Error { using Error::Error; };

} // namespace alphaq
