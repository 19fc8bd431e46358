#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ltddm {

/// Base type for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct HorizonMismatch : Error {
    using Error::Error;
};

/// Raised when a gradient is requested over an all-zero accumulator bank;
/// there is no evidence to attribute, so callers skip the update.
struct ZeroAccumulator : Error {
    using Error::Error;
};

/// Raised when a correction window has zero elapsed steps.
struct DegenerateWindow : Error {
    using Error::Error;
};

struct InvalidPeriod : Error {
    using Error::Error;
};

struct InsufficientHistory : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct CheckpointError : Error {
    using Error::Error;
};

/// Parse failure with a 1-based location. `column` is 0 when the error is
/// not tied to a specific cell.
struct ParseError : Error {
    ParseError(const std::string& message, std::size_t line_no, std::size_t column_no = 0)
        : Error(message + " (line " + std::to_string(line_no) +
                (column_no ? ", column " + std::to_string(column_no) : "") + ")"),
          line(line_no),
          column(column_no) {}

    std::size_t line;
    std::size_t column;
};

/// Input uses a construct outside the supported subset (chords, ties, ...).
struct UnsupportedToken : ParseError {
    using ParseError::ParseError;
};

}  // namespace ltddm
