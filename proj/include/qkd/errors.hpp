#pragma once

#include <stdexcept>
#include <string>

namespace qkd {

// Stable condition codes for protocol and configuration failures. Callers
// branch on the code; the what() string carries diagnostics.
enum class Errc {
    LengthMismatch,
    OutOfRange,
    ParityAgrees,
    NotConverged,
    SafetyViolation,
    DimensionMismatch,
    KeyTooShort,
    EmptyKey,
    SessionClosed,
    InsufficientKey,
    ConfigInvalid,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
    throw Error(code, what);
}

} // namespace qkd
