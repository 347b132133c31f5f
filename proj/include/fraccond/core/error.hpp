#pragma once

#include <stdexcept>
#include <string>

namespace fraccond {

/// Argument outside the mathematical domain of a function (poles, s outside (0,1)).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A domain object failed one of its construction invariants.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Base of all numerical failures (singular systems, failed reconstructions).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverError : public NumericalError {
public:
    SolverError(const std::string& what, double condition_estimate)
        : NumericalError(what), condition_estimate_(condition_estimate) {}

    double condition_estimate() const noexcept { return condition_estimate_; }

private:
    double condition_estimate_;
};

} // namespace fraccond
