#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bjj {

enum class ErrorKind {
    InvalidArgument,
    PoleProximity,
    StepFailure,
    NoRecurrence,
    FixedPointInput,
    InsufficientSpan,
    UndefinedPhase,
    OutOfRange,
    NotCyclic,
    DegenerateCurvature,
    NegativeCoupling,
    NotApplicable,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for every failure in the library; callers branch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace bjj
