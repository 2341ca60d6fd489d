#pragma once

#include <stdexcept>
#include <string>

namespace pantograph {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violates a precondition.
struct InvalidParameterError : Error {
    using Error::Error;
};

/// A series or iteration exceeded its configured budget.
struct NonconvergenceError : Error {
    using Error::Error;
};

/// A sign or enclosure could not be certified at the available precision.
struct CertificationError : Error {
    using Error::Error;
};

/// Fewer isolated roots than required; carries the first failing index.
struct RootCountError : Error {
    RootCountError(const std::string& msg, int index)
        : Error(msg), failing_index(index) {}
    int failing_index;
};

/// Malformed input file; carries the 1-based line number.
struct ParseError : Error {
    ParseError(const std::string& msg, long line_no)
        : Error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    long line;
};

}  // namespace pantograph
