#pragma once

#include <stdexcept>
#include <string>

namespace hcfs {

// Non-finite or otherwise mathematically invalid numeric input.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape, index or ordering violations in data handed between modules.
struct StructuralError : std::logic_error {
    using std::logic_error::logic_error;
};

// Bad key, bad value, or failed validation of a run configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable or unwritable file.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file; remembers the 1-based offending line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

}  // namespace hcfs
