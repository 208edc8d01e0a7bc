#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mixcop {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument outside the documented domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A column with no variation (or a cutoff at infinity) where a finite,
/// non-degenerate value is required.
class DegenerateColumnError : public Error {
public:
    explicit DegenerateColumnError(const std::string& what, std::ptrdiff_t column = -1)
        : Error(what), column_(column) {}

    /// Index of the offending column, or -1 when not attributable.
    std::ptrdiff_t column() const noexcept { return column_; }

private:
    std::ptrdiff_t column_;
};

/// A variable pair for which no bridge function is available.
class UnsupportedPairError : public Error {
public:
    UnsupportedPairError(const std::string& what, std::ptrdiff_t j = -1, std::ptrdiff_t k = -1)
        : Error(what), j_(j), k_(k) {}

    std::ptrdiff_t j() const noexcept { return j_; }
    std::ptrdiff_t k() const noexcept { return k_; }

private:
    std::ptrdiff_t j_;
    std::ptrdiff_t k_;
};

/// An iterative solver exhausted its budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed input text; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace mixcop
