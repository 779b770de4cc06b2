#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace coorbit {

using Complex = std::complex<double>;

enum class ErrorCode {
    InvalidPoint,
    InvalidInput,
    EmptyFamily,
    OutOfRange,
    UnsupportedDimension,
    Unsupported,
    NotAFrame,
    IllConditioned,
    MissingDual,
    InfiniteEnvelope,
    HypothesisViolation,
    Resolution,
    Config,
};

const char* error_code_name(ErrorCode code);

class CoorbitError : public std::runtime_error {
public:
    CoorbitError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw CoorbitError(code, what); }

}  // namespace coorbit
