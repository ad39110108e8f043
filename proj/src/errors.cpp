#include "bjj/errors.hpp"

namespace bjj {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::PoleProximity: return "PoleProximity";
        case ErrorKind::StepFailure: return "StepFailure";
        case ErrorKind::NoRecurrence: return "NoRecurrence";
        case ErrorKind::FixedPointInput: return "FixedPointInput";
        case ErrorKind::InsufficientSpan: return "InsufficientSpan";
        case ErrorKind::UndefinedPhase: return "UndefinedPhase";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::NotCyclic: return "NotCyclic";
        case ErrorKind::DegenerateCurvature: return "DegenerateCurvature";
        case ErrorKind::NegativeCoupling: return "NegativeCoupling";
        case ErrorKind::NotApplicable: return "NotApplicable";
    }
    return "Unknown";
}

}  // namespace bjj
