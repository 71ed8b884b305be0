// errors.hpp: exception types shared by the library and the CLI exit-code mapping

#pragma once

#include <stdexcept>
#include <string>

namespace qbm {

// Invalid argument to a mathematical function (negative frequency, s <= 0, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical result failed an accuracy, convergence or physicality check.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double measured)
        : std::runtime_error(what), measured_(measured) {}
    double measured() const noexcept { return measured_; }

private:
    double measured_;
};

// Coefficient requested at a time where F(t) vanishes.
class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Finite-bath evolution requested past the recurrence time.
class RecurrenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No convention combination reproduced the oracle.
class CalibrationError : public std::runtime_error {
public:
    CalibrationError(const std::string& what, double best)
        : std::runtime_error(what), best_(best) {}
    double best_discrepancy() const noexcept { return best_; }

private:
    double best_;
};

}  // namespace qbm
