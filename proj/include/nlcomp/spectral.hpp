#pragma once

#include "nlcomp/dispersal.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace nlcomp {

enum class SpectralMethod {
    Dense,     ///< full eigendecomposition (symmetric when possible)
    Power,     ///< shifted power iteration
    Rayleigh,  ///< Rayleigh-quotient maximization (locally optimal CG); symmetric only
};

const char* to_string(SpectralMethod method);

/// Top of the spectrum of dispersal + diag(q).
struct SpectralReport {
    double bound = 0.0;
    SpectralMethod method = SpectralMethod::Dense;
    std::optional<Eigen::VectorXd> eigvec;  ///< sign-normalized (positive sum), unit 2-norm
    double residual = 0.0;                  ///< |A v - bound v|_inf / |v|_inf
    bool has_positive_eigvec = false;       ///< the bound behaves like a principal eigenvalue
    bool complex_top = false;               ///< nonsymmetric case with a complex top eigenvalue
    int iterations = 0;
};

struct SpectralOptions {
    double power_tolerance = 1e-12;  ///< on successive Rayleigh quotients (relative to 1 + |rho|)
    double residual_tolerance = 1e-9;
    int max_iterations = 50000;
    std::size_t dense_cutoff = 1000;  ///< above this size Dense falls back to Power
};

/// Matrix of the operator plus diagonal potential.
Eigen::MatrixXd operator_matrix(const DispersalOperator& op, const PotentialField& q);

/// Largest eigenvalue (largest real part for nonsymmetric matrices) of
/// op + diag(q). Iterative methods throw ConvergenceError when they run out
/// of iterations.
SpectralReport spectral_bound(const DispersalOperator& op, const PotentialField& q,
                              SpectralMethod method = SpectralMethod::Dense, const SpectralOptions& options = {});

/// Same, for an explicit matrix. Exposed for tests and sweeps over raw matrices.
SpectralReport spectral_bound(const Eigen::MatrixXd& a, SpectralMethod method = SpectralMethod::Dense,
                              const SpectralOptions& options = {});

/// h phi^T A phi / (h phi^T phi). Throws Error(Contract) for a zero field.
double rayleigh_quotient(const DispersalOperator& op, const PotentialField& q, const StateField& phi);

/// Turns an eigenvector into a strictly positive surrogate normalized to max 1.
/// Components that are not positive are lifted by a shift.
Eigen::VectorXd positive_surrogate(const Eigen::VectorXd& eigvec);

bool is_symmetric(const Eigen::MatrixXd& a, double relative_tolerance = 1e-14);

}  // namespace nlcomp
