// errors.hpp — Exception hierarchy shared by all modules.

#pragma once

#include <stdexcept>
#include <string>

namespace eitcool {

// Malformed scenario / configuration input. Carries the offending line and
// field so the CLI can point at the problem.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string message, int line = 0, std::string field = {})
        : std::runtime_error(std::move(message)), line_(line), field_(std::move(field)) {}

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

// Physics-level failure: non-convergence, positivity loss, singular solves,
// evaluation at a spectral pole. Distinct from precondition violations, which
// use std::invalid_argument.
class PhysicsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Evaluation of an analytic spectrum too close to one of its real poles.
class PoleError : public PhysicsError {
public:
    PoleError(const std::string& message, double pole)
        : PhysicsError(message), pole_(pole) {}

    double pole() const noexcept { return pole_; }

private:
    double pole_;
};

} // namespace eitcool
