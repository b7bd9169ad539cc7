#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ricsim {

enum class ErrorCode {
    // ran_model
    UnknownUe,
    CesDisabled,
    IllegalTransition,
    // traffic
    ParseError,
    GridError,
    RangeError,
    // messages
    DecodeError,
    InvalidMessage,
    UnknownCell,
    CoverageForbidden,
    // near_rt_ric
    DuplicateId,
    UnknownId,
    // es_rapp
    InsufficientHistory,
    // sim_engine / metrics
    ConfigError,
    NonQuiescence,
    CorruptLog,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind instead of the message text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace ricsim
