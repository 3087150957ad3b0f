#pragma once

#include <stdexcept>
#include <string>

namespace nlcomp {

/// Failure categories. The CLI maps each one to a fixed exit code.
enum class ErrorKind {
    Config,       ///< malformed or out-of-range input
    Hypothesis,   ///< a modelling hypothesis fails (e.g. a semi-trivial state is missing)
    Unsupported,  ///< regime outside the classification (strong competition)
    Numerical,    ///< dt collapse, non-convergence, diagnostic failure
    Contract,     ///< caller violated a precondition (grid mismatch, zero field, ...)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Iterative eigen-solve gave up. For symmetric operators the last Rayleigh
/// quotient is still a valid lower bound on the spectral bound.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double lower_bound, int iterations)
        : Error(ErrorKind::Numerical, what), lower_bound_(lower_bound), iterations_(iterations) {}

    double lower_bound() const noexcept { return lower_bound_; }
    int iterations() const noexcept { return iterations_; }

private:
    double lower_bound_;
    int iterations_;
};

inline int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Config:
        return 2;
    case ErrorKind::Hypothesis:
        return 3;
    case ErrorKind::Unsupported:
        return 4;
    case ErrorKind::Numerical:
        return 5;
    case ErrorKind::Contract:
        return 1;
    }
    return 1;
}

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Config:
        return "config error";
    case ErrorKind::Hypothesis:
        return "hypothesis violation";
    case ErrorKind::Unsupported:
        return "unsupported regime";
    case ErrorKind::Numerical:
        return "numerical failure";
    case ErrorKind::Contract:
        return "contract violation";
    }
    return "error";
}

}  // namespace nlcomp
