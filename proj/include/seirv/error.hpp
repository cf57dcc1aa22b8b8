#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seirv {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: out-of-range parameters, malformed files, violated preconditions.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A computation could not produce a finite result.
class NumericalError : public Error {
public:
    using Error::Error;
};

class ParseError : public ValidationError {
public:
    ParseError(std::size_t line, const std::string& what)
        : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Integration produced a non-finite state.
class DivergenceError : public NumericalError {
public:
    DivergenceError(std::size_t step, double time)
        : NumericalError("integration diverged at step " + std::to_string(step) + " (t = " +
                         std::to_string(time) + ")"),
          step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class NoEndemicPointError : public ValidationError {
public:
    explicit NoEndemicPointError(double rc)
        : ValidationError("no endemic equilibrium: R_c = " + std::to_string(rc) + " <= 1"), rc_(rc) {}

    double rc() const noexcept { return rc_; }

private:
    double rc_;
};

}  // namespace seirv
