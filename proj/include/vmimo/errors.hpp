#pragma once

#include <stdexcept>
#include <string>

namespace vmimo {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Input is valid but the model has no usable answer (e.g. the normal
/// approximation cannot reach the requested outage).
class ModelDomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure failed to converge. Carries whatever estimate it had.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double partial)
        : std::runtime_error(what), partial_(partial) {}

    double partial() const noexcept { return partial_; }

private:
    double partial_;
};

/// Simulation could not produce an estimate (e.g. every replicate censored).
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vmimo
