#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tlsbath {

/// Input outside the domain where a rate formula is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed call arguments (unsorted grids, non-finite samples, ...).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Propagation produced non-finite or out-of-range populations.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A least-squares fit could not be set up or produced nothing usable.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Trace file does not match the CSV schema. `line()` is 1-based; 0 means
/// the whole file (e.g. empty input).
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Run configuration failed validation. `path()` is the dotted field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& what)
        : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace tlsbath
