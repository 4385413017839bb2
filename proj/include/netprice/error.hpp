#pragma once

#include <stdexcept>
#include <string>

namespace netprice {

enum class ErrorKind {
    InvalidInput,
    Infeasible,
    AssumptionViolation,
    NumericalFailure,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error invalid_input(const std::string& what) { return {ErrorKind::InvalidInput, what}; }
inline Error infeasible(const std::string& what) { return {ErrorKind::Infeasible, what}; }
inline Error assumption_violation(const std::string& what) { return {ErrorKind::AssumptionViolation, what}; }
inline Error numerical_failure(const std::string& what) { return {ErrorKind::NumericalFailure, what}; }

// Process exit code for the command line tool.
inline int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Infeasible: return 2;
    case ErrorKind::AssumptionViolation: return 3;
    case ErrorKind::NumericalFailure: return 4;
    case ErrorKind::InvalidInput: break;
    }
    return 1;
}

}  // namespace netprice
