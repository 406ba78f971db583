#ifndef TWORV_ERROR_HPP
#define TWORV_ERROR_HPP

#include <stdexcept>
#include <string>

namespace tworv {

/// Invalid argument or parameter outside its documented box.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Evaluation requested outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

/// Iteration cap, overflow, non-convergence, or failed internal consistency check.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// No admissible estimate exists for the requested target.
class FitError : public std::runtime_error {
public:
    explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace tworv

#endif
