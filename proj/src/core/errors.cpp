#include "sohb/errors.hpp"

namespace sohb {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Ok: return "Ok";
        case ErrorCode::DegenerateAverage: return "DegenerateAverage";
        case ErrorCode::BoxTooSmall: return "BoxTooSmall";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::SignDiscontinuity: return "SignDiscontinuity";
        case ErrorCode::CflViolation: return "CflViolation";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace sohb
