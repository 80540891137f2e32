#pragma once

#include <stdexcept>
#include <string>

namespace walkdrift {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Lemma hypothesis 3 fails: truncated expectation >= lambda*(1-alpha).
struct DominanceGapError : Error {
    using Error::Error;
};

struct EmptySampleError : Error {
    using Error::Error;
};

// Too many censored trajectories for a pass/fail verdict.
struct CensoringError : Error {
    using Error::Error;
};

struct ScheduleValidationError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct NumericalRankError : Error {
    using Error::Error;
};

// Enumeration ran past its configured cap.
struct ExplosionError : Error {
    using Error::Error;
};

struct RankError : Error {
    using Error::Error;
};

struct ConfigParseError : Error {
    ConfigParseError(const std::string& msg, int line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
    int line_number;
};

}  // namespace walkdrift
