#pragma once

#include "nlcomp/dispersal.hpp"
#include "nlcomp/spectral.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace nlcomp {

/// Reaction term f(x_i, u_i), vectorized over the grid.
struct Reaction {
    std::function<StateField(const StateField&)> value;
    std::function<StateField(const StateField&)> derivative;  ///< df/du at each node
};

/// f(x, u) = u (growth(x) - self(x) u)
Reaction logistic_reaction(PotentialField growth, PotentialField self);

/// u_t = L[u] + f(x, u) on a fixed operator.
class SingleSpeciesProblem {
public:
    /// Logistic problem d K[u] + u (growth - self u); self defaults to 1.
    static SingleSpeciesProblem logistic(std::shared_ptr<const DispersalOperator> op, PotentialField growth,
                                         std::optional<PotentialField> self = std::nullopt);

    /// General reaction satisfying f(x,0) = 0 and f(x,u)/u strictly decreasing.
    /// Both are checked by sampling; violations throw Error(Config).
    static SingleSpeciesProblem general(std::shared_ptr<const DispersalOperator> op, Reaction reaction);

    const DispersalOperator& op() const noexcept { return *op_; }
    const std::shared_ptr<const DispersalOperator>& op_ptr() const noexcept { return op_; }
    const Reaction& reaction() const noexcept { return reaction_; }
    /// f_u(x, 0)
    const PotentialField& growth() const noexcept { return growth_; }

    /// op[u] + f(u)
    StateField residual(const StateField& u) const;

private:
    SingleSpeciesProblem(std::shared_ptr<const DispersalOperator> op, Reaction reaction);

    std::shared_ptr<const DispersalOperator> op_;
    Reaction reaction_;
    PotentialField growth_;
};

inline constexpr double kLambdaThreshold = 1e-8;

struct SteadyStateResult {
    bool exists = false;
    bool degenerate = false;  ///< |lambda*| inside the threshold band
    std::optional<StateField> state;
    double lambda_star = 0.0;
    double residual = 0.0;
    long iterations = 0;          ///< explicit steps spent by both monotone marches
    double uniqueness_gap = 0.0;  ///< |from-above limit - from-below limit|_inf
    std::optional<StateField> upper_limit;
    std::optional<StateField> lower_limit;
};

/// Spectral bound of op + f_u(x, 0).
double lambda_star(const SingleSpeciesProblem& problem);

struct MarchOptions {
    double convergence_tolerance = 1e-10;
    int convergence_windows = 5;
    double max_time = 20000.0;
    bool stop_on_convergence = true;
    bool record_samples = false;
};

struct SingleTrajectory {
    StateField final;
    double t_final = 0.0;
    bool converged = false;
    std::vector<double> times;           ///< unit-time sample times (t = 0 included)
    std::vector<double> min_series;      ///< min over grid at each sample
    std::vector<StateField> samples;     ///< filled when record_samples is set
    std::optional<double> sup_dist_to_steady;
    long steps = 0;
    double dt = 0.0;
};

/// Monotone squeeze: marches from the constant upper solution and from a small
/// multiple of the positive top eigenvector, then polishes the common limit with
/// Newton's method. Throws Error(Numerical) when the two limits disagree.
SteadyStateResult solve_steady_state(const SingleSpeciesProblem& problem);

/// Explicit Euler (backward Euler on any Laplacian part) from u0 until
/// `horizon`, or earlier on convergence when options.stop_on_convergence.
/// When `steady` is given the sup distance to it is reported.
SingleTrajectory time_march_single(const SingleSpeciesProblem& problem, const StateField& u0, double horizon,
                                   const MarchOptions& options = {}, const StateField* steady = nullptr);

/// Constant upper solution level used to start the from-above march.
double upper_solution_level(const SingleSpeciesProblem& problem);

}  // namespace nlcomp
