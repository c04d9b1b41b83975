#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ctq {

enum class ErrorCode : int {
    Ok = 0,
    EmptyVector,
    NegativeValue,
    DuplicateId,
    DimensionOutOfRange,
    ParseError,
    IoError,
    FormatVersionMismatch,
    ChecksumMismatch,
    UnknownDim,
    InvalidBound,
    AllExhausted,
    UnknownStrategy,
    InstanceTooLarge,
    BadArgument,
    Internal,
};

const char* error_code_name(ErrorCode code);

/// Library error; carries a stable code plus a human-readable detail string.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Numeric policy shared across the whole engine.
//
// Threshold comparisons are inclusive with a relative slack so that a vector
// whose true cosine equals theta is accepted even after normalization
// rounding (e.g. querying an indexed vector with itself at theta = 1).
// Every decision path (gathering stop, partial verification, linear scan)
// uses the same effective threshold, so they can never disagree.
inline constexpr double kThetaRelSlack = 1e-12;

/// Effective decision threshold: score >= effective_theta(theta) counts as a hit.
inline double effective_theta(double theta) {
    return theta * (1.0 - kThetaRelSlack);
}

inline bool meets_threshold(double score, double theta) {
    return score >= effective_theta(theta);
}

// Partial-verification early exits keep a safety margin well above the
// floating-point error of the Cauchy-Schwarz bounds (stored vectors are unit
// within ~1e-15, so the bounds are valid within ~1e-8). Inside the margin the
// scan continues until the exact comparison decides.
inline constexpr double kVerifyBoundMargin = 1e-7;

// Entries this small after normalization are dropped to keep all stored
// values strictly positive.
inline constexpr double kMinEntryValue = 1e-12;

}  // namespace ctq
