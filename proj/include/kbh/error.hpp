#pragma once

#include <stdexcept>
#include <string>

namespace kbh {

// Base for every error raised by the library. The CLI maps each subclass to a
// stable exit code (see tools/kbh.cpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameter outside its admissible range (alpha, eta, lambda, grid sizes, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Shapes do not satisfy the case requirements (n < 2d for knockoffs, n <= d, ...).
class DimensionError : public Error {
public:
    using Error::Error;
};

class RankError : public Error {
public:
    using Error::Error;
};

// Matrix expected to be positive (semi)definite or invertible is not.
class NumericalError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Malformed input text; carries 1-based line and column when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error(format(what, line, column)), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        if (line == 0) return what;
        std::string out = "line " + std::to_string(line);
        if (column != 0) out += ", column " + std::to_string(column);
        return out + ": " + what;
    }

    std::size_t line_;
    std::size_t column_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace kbh
