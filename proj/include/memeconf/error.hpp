#pragma once

#include <stdexcept>
#include <string>

namespace memeconf {

enum class Errc {
    invalid_argument,   // bad option / precondition violated by the caller
    parse,              // malformed input text
    duplicate_id,
    missing_field,
    out_of_range,       // e.g. probability outside [0, 1]
    coverage_mismatch,  // two id sets that must match do not
    missing_id,
    degenerate,         // input too small or single-class
    io,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

inline const char* errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::parse: return "parse";
    case Errc::duplicate_id: return "duplicate-id";
    case Errc::missing_field: return "missing-field";
    case Errc::out_of_range: return "out-of-range";
    case Errc::coverage_mismatch: return "coverage-mismatch";
    case Errc::missing_id: return "missing-id";
    case Errc::degenerate: return "degenerate";
    case Errc::io: return "io";
    }
    return "unknown";
}

} // namespace memeconf
