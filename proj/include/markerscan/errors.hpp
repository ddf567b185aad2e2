#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace markerscan {

// Error taxonomy shared by the library and the CLI. The CLI maps each
// class to a process exit code (see tools/markerscan).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally bad input data (unparseable record, bad CSV cell, ...).
struct ParseError : std::runtime_error {
    ParseError(std::string msg, int64_t line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg
                                      : std::move(msg)),
          line_number(line) {}
    int64_t line_number;
};

// Well-formed input violating a domain invariant (year range, duplicate id).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration: suite files, synth configs, flag combinations.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Counts data does not span the years a computation needs.
struct CoverageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace markerscan
