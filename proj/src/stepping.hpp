#pragma once

// Internal time-stepping helpers shared by the single-species and competition
// integrators.

#include "nlcomp/dispersal.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <memory>

namespace nlcomp::detail {

/// Backward-Euler solve for the Laplacian part of a mixed operator:
/// (I - dt * rate * (1 - mix) * Lap) y = rhs. The system matrix is an
/// M-matrix, so the solve preserves positivity and order.
class LocalSolver {
public:
    explicit LocalSolver(const DispersalOperator& op) : op_(&op) {}

    void set_dt(double dt) {
        if (!op_->has_local_part() || dt == dt_) {
            return;
        }
        dt_ = dt;
        const auto n = static_cast<Eigen::Index>(op_->grid().size());
        Eigen::SparseMatrix<double> eye(n, n);
        eye.setIdentity();
        const Eigen::SparseMatrix<double> system = eye - (dt * op_->local_coefficient()) * (*op_->local_part());
        solver_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(system);
    }

    void solve_in_place(Eigen::VectorXd& rhs) const {
        if (solver_) {
            rhs = solver_->solve(rhs);
        }
    }

private:
    const DispersalOperator* op_;
    double dt_ = -1.0;
    std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> solver_;
};

/// Steps per unit time for a stability bound L; dt = 1 / steps so that
/// samples land exactly on integer times.
inline long steps_per_unit(double stiffness) {
    const double dt_max = 0.4 / std::max(stiffness, 1e-12);
    return std::max(1L, static_cast<long>(std::ceil(1.0 / dt_max)));
}

inline constexpr double kMinDt = 1e-7;

/// Change-per-unit-time convergence detector: |x(t+1) - x(t)|_inf below
/// tol * (1 + |x|_inf) for `windows` consecutive unit windows.
class ConvergenceDetector {
public:
    ConvergenceDetector(double tolerance, int windows) : tolerance_(tolerance), windows_(windows) {}

    bool update(double change, double scale) {
        streak_ = change < tolerance_ * (1.0 + scale) ? streak_ + 1 : 0;
        return streak_ >= windows_;
    }

private:
    double tolerance_;
    int windows_;
    int streak_ = 0;
};

}  // namespace nlcomp::detail
