#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cpt {

enum class ErrorCode {
    InvalidEnvelope,
    InvalidGrid,
    InvalidMedium,
    DegeneratePulse,
    NonUnitary,
    NonFinite,
    Blowup,
    WindowTooSmall,
    WindowExceeded,
    Multivalued,
    NoRoot,
    Infeasible,
    CrossedCharacteristics,
    NonConvergent,
    ParseError,
    ValidationError,
    IoError,
    UnknownScenario,
};

/// Stable machine-readable name, e.g. "WINDOW_TOO_SMALL".
std::string_view code_name(ErrorCode code);

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), m_code(code)
    {
    }

    ErrorCode code() const { return m_code; }

private:
    ErrorCode m_code;
};

} // namespace cpt
