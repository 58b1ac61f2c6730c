// errors.hpp — exception types shared by every module.
//
// ValidationError: caller supplied inputs outside an operation's domain.
// NumericalError: a computation could not reach the requested accuracy.

#pragma once

#include <stdexcept>
#include <string>

namespace dtc {

class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double diagnostic = 0.0)
        : std::runtime_error(what), diagnostic_(diagnostic) {}

    // Operation-specific figure of merit (worst local error, achieved floor, drift, ...)
    double diagnostic() const noexcept { return diagnostic_; }

private:
    double diagnostic_;
};

} // namespace dtc
