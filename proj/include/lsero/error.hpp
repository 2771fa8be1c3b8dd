#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lsero {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (grids, tables, config). Carries the 1-based position.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, std::size_t column, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_{line}, column_{column} {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Rasters with incompatible headers, or grids too small for an operation.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A semantic constraint on values was violated (nonnegative, proportion, ...).
class InvariantError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Bad configuration: unknown keys, missing cover classes, invalid values.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A landslide could not be placed on the eligible cells.
class PlacementError : public Error {
public:
    using Error::Error;
};

/// Wraps any failure inside one Monte Carlo iteration.
class IterationError : public Error {
public:
    IterationError(std::uint64_t run_index, const std::string& what)
        : Error("run " + std::to_string(run_index) + ": " + what), run_index_{run_index} {}

    std::uint64_t run_index() const noexcept { return run_index_; }

private:
    std::uint64_t run_index_;
};

/// Should never happen; signals a bug (e.g. a cycle in a D-infinity flow field).
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace lsero
