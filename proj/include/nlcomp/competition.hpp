#pragma once

#include "nlcomp/dispersal.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nlcomp {

/// Coefficients of
///   u_t = d {alpha K[u] + (1-alpha) Lap u} + u (m - b1 u - c v)
///   v_t = D {beta  P[v] + (1-beta)  Lap v} + v (M - b u  - c1 v)
/// The rates d, D and mixing weights alpha, beta live inside the operators.
struct ModelParams {
    std::shared_ptr<const DispersalOperator> op_u;
    std::shared_ptr<const DispersalOperator> op_v;
    PotentialField m, M;
    PotentialField b, c;    ///< interspecific competition
    PotentialField b1, c1;  ///< self-regulation

    /// Constant interspecific coefficients and unit self-regulation.
    static ModelParams lotka_volterra(std::shared_ptr<const DispersalOperator> op_u,
                                      std::shared_ptr<const DispersalOperator> op_v, PotentialField m,
                                      PotentialField M, double b, double c);

    const SpatialGrid& grid() const { return op_u->grid(); }
    std::size_t size() const { return op_u->grid().size(); }

    /// Throws Error(Config) on shape mismatch, non-finite values or
    /// nonpositive b, c, b1, c1.
    void validate() const;

    /// max b * max c
    double competition_product() const { return b.maxCoeff() * c.maxCoeff(); }
    /// min b1 * min c1
    double self_product() const { return b1.minCoeff() * c1.minCoeff(); }
    /// max b * max c <= min b1 * min c1 (bc <= 1 for the plain model)
    bool weak_competition() const;
};

struct SystemState {
    StateField u;
    StateField v;
    double t = 0.0;
};

/// Right-hand side of the system at a state.
SystemState system_rhs(const ModelParams& params, const SystemState& state);
/// max of the two sup-norm residuals of the steady equations.
double steady_residual(const ModelParams& params, const SystemState& state);

/// (u1, v1) <=_c (u2, v2) iff u1 <= u2 and v1 >= v2, with additive slack.
bool competitively_le(const SystemState& a, const SystemState& b, double slack = 0.0);

struct OrderFractions {
    double theta = 0.0;  ///< largest s with u >= s u_ref and v <= (1-s) v_ref
    double eta = 0.0;    ///< smallest s with u <= s u_ref and v >= (1-s) v_ref
};

/// Throws Error(Contract) unless both references are strictly positive.
OrderFractions order_fractions(const SystemState& state, const StateField& u_ref, const StateField& v_ref);

struct EnergyDiagnostics {
    double energy = 0.0;         ///< h sum (w + c z)^2, w = u - s u_d, z = v - (1-s) v_D
    double energy_direct = 0.0;  ///< h sum (u + c v - u_d)^2
    bool s_independent = false;  ///< the two agree (holds when c v_D = u_d)
    bool degenerate_config = false;
    std::string advisory;        ///< set when evaluated outside the degenerate configuration
};

EnergyDiagnostics energy_residual(const SystemState& state, const ModelParams& params, const StateField& u_d,
                                  const StateField& v_D, double s);

struct SymmetrizationGap {
    double lhs = 0.0;
    double rhs = 0.0;
    bool ordered = false;  ///< u > u_star at every node
    bool sign_ok = true;   ///< lhs <= 0 and rhs <= 0 whenever ordered
};

/// Both sides of the exchange identity for the kernel part of `op`:
///   h sum_i [-u_i (K u*)_i + u*_i (K u)_i] (u_i - u*_i)^2 / (u_i u*_i)
///   = 1/2 h^2 sum_ij k_ij [u*_i u_j - u_i u*_j]^2 (1/(u_i u_j) - 1/(u*_i u*_j)).
/// Needs a purely nonlocal, symmetric NoFlux or Periodic operator.
SymmetrizationGap symmetrization_gap(const DispersalOperator& op, const StateField& u, const StateField& u_star);

enum class LimitType { UWins, VWins, Coexist, ContinuumPoint, Undecided };
const char* to_string(LimitType type);

/// Candidate limit sets a simulation is classified against.
struct AttractorSet {
    std::optional<StateField> u_d;
    std::optional<StateField> v_D;
    std::optional<SystemState> coexistence;
    bool continuum = false;  ///< the line {(s u_d, (1-s) v_D) : 0 <= s <= 1}; replaces the endpoints
};

struct LimitClassification {
    LimitType type = LimitType::Undecided;
    double distance = 0.0;  ///< sup distance to the nearest candidate (NaN if none)
    std::optional<double> s_estimate;
};

/// Nearest candidate in sup norm within `threshold`; ties and s-estimate
/// mismatches above 1e-4 give Undecided.
LimitClassification classify_limit(const SystemState& state, const AttractorSet& attractors, double threshold);

/// sup-norm distance from a state to the continuum line
double distance_to_continuum(const SystemState& state, const StateField& u_d, const StateField& v_D);

struct TimeSeriesRow {
    double t = 0.0;
    double theta = 0.0;
    double eta = 0.0;
    double energy = 0.0;
    double l2_u = 0.0;
    double l2_v = 0.0;
    double sup_dist = 0.0;
};

struct SimulationControls {
    double horizon = 200.0;
    bool stop_on_convergence = true;
    double convergence_tolerance = 1e-10;
    int convergence_windows = 5;
    double classify_threshold = 1e-4;
    bool record_states = false;  ///< keep a snapshot at every unit time
    AttractorSet attractors;
};

struct SimulationOutcome {
    SystemState final;
    bool converged = false;  ///< steady residual of `final` below 1e-6
    double residual = 0.0;
    LimitType limit_type = LimitType::Undecided;
    std::optional<double> s_estimate;
    double attractor_distance = 0.0;
    std::vector<TimeSeriesRow> series;
    std::vector<SystemState> snapshots;
    bool both_vanished = false;  ///< both L2 masses fell below 1e-8 at some sample
    std::string trend;           ///< residual trend when not converged
    long steps = 0;
    double dt = 0.0;
};

/// Explicit Euler co-stepping of both equations on a shared dt (backward
/// Euler on Laplacian parts). Samples at unit times. Raw simulation runs in
/// any competition regime.
SimulationOutcome simulate(const ModelParams& params, const SystemState& init, const SimulationControls& controls);

struct BracketReport {
    SystemState upper_start, lower_start;
    SystemState upper_limit, lower_limit;
    double distance = 0.0;   ///< sup distance between the two limits
    bool certified = false;  ///< distance <= 1e-6
    double max_monotonicity_violation = 0.0;
    long samples = 0;
};

/// Runs the upper pair ((1+delta) u_d, eps psi+) and the lower pair
/// (eps phi+, (1+delta) v_D), with psi+, phi+ positive top eigenvectors of the
/// linearizations at (u_d, 0) and (0, v_D). Throws Error(Numerical) on any
/// violation of monotonicity in competitive order beyond 1e-10.
BracketReport monotone_bracket(const ModelParams& params, const StateField& u_d, const StateField& v_D, double delta,
                               double eps, double horizon = 5000.0);

/// True iff the competitive order of two ordered initial states survives at
/// every unit-time sample (1e-10 slack). Unordered inputs throw Error(Contract).
bool comparison_check(const ModelParams& params, const SystemState& init_a, const SystemState& init_b,
                      double horizon);

}  // namespace nlcomp
