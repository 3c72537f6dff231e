#pragma once

#include <stdexcept>
#include <string>

namespace sohb {

// Numeric values are part of the C ABI (see sohb.h); never renumber.
enum class ErrorCode : int {
    Ok = 0,
    DegenerateAverage = 1,
    BoxTooSmall = 2,
    NoConvergence = 3,
    DomainError = 4,
    SignDiscontinuity = 5,
    CflViolation = 6,
    ParseError = 7,
    SchemaError = 8,
    TooFewSamples = 9,
    IoError = 10,
    InvalidArgument = 11,
    Internal = 99,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define SOHB_DEFINE_ERROR(Name)                                                      \
    class Name : public Error {                                                      \
    public:                                                                          \
        explicit Name(const std::string& what) : Error(ErrorCode::Name, what) {}    \
    }

SOHB_DEFINE_ERROR(DegenerateAverage);
SOHB_DEFINE_ERROR(BoxTooSmall);
SOHB_DEFINE_ERROR(NoConvergence);
SOHB_DEFINE_ERROR(DomainError);
SOHB_DEFINE_ERROR(SignDiscontinuity);
SOHB_DEFINE_ERROR(CflViolation);
SOHB_DEFINE_ERROR(ParseError);
SOHB_DEFINE_ERROR(TooFewSamples);
SOHB_DEFINE_ERROR(IoError);
SOHB_DEFINE_ERROR(InvalidArgument);

#undef SOHB_DEFINE_ERROR

// Carries the JSON path of the offending field, e.g. "D" or "macro.nx".
class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& what)
        : Error(ErrorCode::SchemaError, path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace sohb
