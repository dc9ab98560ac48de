#pragma once

#include <stdexcept>
#include <string>

namespace egofuse {

// Malformed or inconsistent input (bad file, bad arguments, unsorted stream).
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (singular matrix, failed decomposition, no consensus).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonMonotoneTime : InputError {
    explicit NonMonotoneTime(const std::string& msg) : InputError(msg) {}
};

struct GapTooLarge : InputError {
    explicit GapTooLarge(const std::string& msg) : InputError(msg) {}
};

struct TimestampMismatch : InputError {
    explicit TimestampMismatch(const std::string& msg) : InputError(msg) {}
};

struct DimensionMismatch : InputError {
    explicit DimensionMismatch(const std::string& msg) : InputError(msg) {}
};

struct OutOfUnambiguousRange : InputError {
    explicit OutOfUnambiguousRange(const std::string& msg) : InputError(msg) {}
};

struct IndexOutOfBounds : InputError {
    explicit IndexOutOfBounds(const std::string& msg) : InputError(msg) {}
};

struct NotSPD : NumericError {
    explicit NotSPD(const std::string& msg) : NumericError(msg) {}
};

struct RankDeficient : NumericError {
    explicit RankDeficient(const std::string& msg) : NumericError(msg) {}
};

struct TooFewDetections : InputError {
    explicit TooFewDetections(const std::string& msg) : InputError(msg) {}
};

struct NoConsensus : NumericError {
    explicit NoConsensus(const std::string& msg) : NumericError(msg) {}
};

}  // namespace egofuse
