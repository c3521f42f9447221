#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace purcell {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A netlist (or another structured input) violates one of its invariants.
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, std::vector<std::string> offending = {})
        : Error(what), offending_(std::move(offending)) {}

    [[nodiscard]] const std::vector<std::string>& offending() const noexcept { return offending_; }

private:
    std::vector<std::string> offending_;
};

/// An argument lies outside the domain of the operation (e.g. omega <= 0).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Quality factor undefined because Re[Y] <= 0.
class UndefinedQError : public DomainError {
public:
    using DomainError::DomainError;
};

class NoPassbandError : public Error {
public:
    using Error::Error;
};

class CalibrationError : public Error {
public:
    CalibrationError(const std::string& what, double achieved)
        : Error(what), achieved_(achieved) {}

    /// Best value reached before giving up (same quantity as the target).
    [[nodiscard]] double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

class NoResonanceError : public Error {
public:
    using Error::Error;
};

/// Text input could not be parsed; `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

}  // namespace purcell
