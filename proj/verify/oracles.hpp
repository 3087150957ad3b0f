#pragma once

// Reference computations that share no code path with the library solvers.

#include "nlcomp/competition.hpp"
#include "nlcomp/dispersal.hpp"
#include "nlcomp/kernel.hpp"

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace nlcomp::oracle {

/// Number of eigenvalues of the symmetric matrix a strictly greater than x,
/// from the inertia of an unpivoted LDL^T factorization of a - x I.
int count_above(const Eigen::MatrixXd& a, double x);

/// Largest eigenvalue of a symmetric matrix by bisection on the inertia count.
double top_eigenvalue_bisection(const Eigen::MatrixXd& a, double tolerance = 1e-13);

/// All eigenvalues of a small symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a);

/// Kernel sum evaluated pair by pair, with periodic images over a generous
/// window. Returns sum_j k(x_i - x_j) h phi_j - outflow_i phi_i.
Eigen::VectorXd brute_force_dispersal(const KernelSpec& kernel, const SpatialGrid& grid,
                                      const BoundaryRegime& regime, const Eigen::VectorXd& phi);

/// Classical RK4 for u' = u (m - u - c v), v' = v (m - b u - v) with constants.
std::pair<double, double> ode_limit(double u0, double v0, double m, double b, double c, double horizon,
                                    double dt = 1e-3);

/// theta and eta from their definitions: bisection on s for the pointwise
/// inequalities rather than min/max formulas.
std::pair<double, double> scan_order_fractions(const SystemState& state, const Eigen::VectorXd& u_ref,
                                               const Eigen::VectorXd& v_ref);

/// Right side of the exchange identity summed column-first in long double.
double exchange_rhs(const DispersalOperator& op, const Eigen::VectorXd& u, const Eigen::VectorXd& u_star);

}  // namespace nlcomp::oracle
