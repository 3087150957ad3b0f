#include "nlcomp/single_species.hpp"

#include "nlcomp/error.hpp"
#include "stepping.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace nlcomp {

Reaction logistic_reaction(PotentialField growth, PotentialField self) {
    Reaction r;
    r.value = [growth, self](const StateField& u) -> StateField {
        return u.cwiseProduct(growth - self.cwiseProduct(u));
    };
    r.derivative = [growth, self](const StateField& u) -> StateField {
        return growth - 2.0 * self.cwiseProduct(u);
    };
    return r;
}

SingleSpeciesProblem::SingleSpeciesProblem(std::shared_ptr<const DispersalOperator> op, Reaction reaction)
    : op_(std::move(op)), reaction_(std::move(reaction)) {
    if (!op_) {
        throw Error(ErrorKind::Contract, "single-species problem needs an operator");
    }
    const auto n = static_cast<Eigen::Index>(op_->grid().size());
    growth_ = reaction_.derivative(StateField::Zero(n));
    if (growth_.size() != n || !growth_.allFinite()) {
        throw Error(ErrorKind::Config, "reaction slope at zero must be finite on every node");
    }
}

SingleSpeciesProblem SingleSpeciesProblem::logistic(std::shared_ptr<const DispersalOperator> op,
                                                    PotentialField growth, std::optional<PotentialField> self) {
    if (!op) {
        throw Error(ErrorKind::Contract, "single-species problem needs an operator");
    }
    const auto n = static_cast<Eigen::Index>(op->grid().size());
    PotentialField s = self ? std::move(*self) : PotentialField::Ones(n);
    if (growth.size() != n || s.size() != n) {
        throw Error(ErrorKind::Contract, "coefficient fields do not live on the operator's grid");
    }
    if (!growth.allFinite() || !s.allFinite() || s.minCoeff() <= 0.0) {
        throw Error(ErrorKind::Config, "logistic growth must be finite and self-regulation positive");
    }
    return SingleSpeciesProblem(std::move(op), logistic_reaction(std::move(growth), std::move(s)));
}

SingleSpeciesProblem SingleSpeciesProblem::general(std::shared_ptr<const DispersalOperator> op, Reaction reaction) {
    SingleSpeciesProblem problem(std::move(op), std::move(reaction));
    const auto n = static_cast<Eigen::Index>(problem.op().grid().size());
    const StateField at_zero = problem.reaction_.value(StateField::Zero(n));
    if (at_zero.cwiseAbs().maxCoeff() != 0.0) {
        throw Error(ErrorKind::Config, "reaction must vanish at u = 0");
    }
    // f(x,u)/u strictly decreasing, sampled on a geometric ladder of levels
    const double top = problem.growth_.cwiseAbs().maxCoeff() + 1.0;
    StateField previous_ratio;
    for (int k = 0; k <= 24; ++k) {
        const double level = top * std::pow(2.0, k - 16);
        const StateField u = StateField::Constant(n, level);
        const StateField ratio = problem.reaction_.value(u) / level;
        if (!ratio.allFinite()) {
            throw Error(ErrorKind::Config, "reaction is not finite on sampled levels");
        }
        if (k > 0 && (ratio.array() >= previous_ratio.array()).any()) {
            throw Error(ErrorKind::Config, "reaction f(x,u)/u must be strictly decreasing in u");
        }
        previous_ratio = ratio;
    }
    return problem;
}

StateField SingleSpeciesProblem::residual(const StateField& u) const {
    return op_->apply(u) + reaction_.value(u);
}

double lambda_star(const SingleSpeciesProblem& problem) {
    return spectral_bound(problem.op(), problem.growth()).bound;
}

double upper_solution_level(const SingleSpeciesProblem& problem) {
    const auto n = static_cast<Eigen::Index>(problem.op().grid().size());
    double level = problem.growth().cwiseAbs().maxCoeff() + 1.0;
    for (int k = 0; k < 60; ++k) {
        if (problem.residual(StateField::Constant(n, level)).maxCoeff() <= 0.0) {
            return level;
        }
        level *= 2.0;
    }
    throw Error(ErrorKind::Numerical, "no constant upper solution found");
}

namespace {

double stiffness(const SingleSpeciesProblem& problem) {
    const auto& op = problem.op();
    const double growth_norm = problem.growth().cwiseAbs().maxCoeff();
    const double cap = growth_norm + 1.0;
    return op.rate() * op.adiag().maxCoeff() + growth_norm + 2.0 * cap;
}

}  // namespace

SingleTrajectory time_march_single(const SingleSpeciesProblem& problem, const StateField& u0, double horizon,
                                   const MarchOptions& options, const StateField* steady) {
    const auto& op = problem.op();
    const auto n = static_cast<Eigen::Index>(op.grid().size());
    if (u0.size() != n) {
        throw Error(ErrorKind::Contract, "initial field does not live on the operator's grid");
    }
    if (!u0.allFinite() || u0.minCoeff() < 0.0 || u0.maxCoeff() <= 0.0) {
        throw Error(ErrorKind::Contract, "initial field must be nonnegative and nonzero");
    }

    SingleTrajectory out;
    double dt = 1.0 / static_cast<double>(detail::steps_per_unit(stiffness(problem)));
    detail::LocalSolver local(op);
    detail::ConvergenceDetector detector(options.convergence_tolerance, options.convergence_windows);

    StateField u = u0;
    StateField flux(n);
    StateField trial(n);
    double t = 0.0;

    auto record = [&] {
        out.times.push_back(t);
        out.min_series.push_back(u.minCoeff());
        if (options.record_samples) {
            out.samples.push_back(u);
        }
    };
    record();

    const double end = std::min(horizon, options.max_time);
    while (t < end - 1e-12) {
        const StateField window_start = u;
        const double window_end = std::min(std::floor(t + 1e-9) + 1.0, end);
        while (t < window_end - 1e-12) {
            const double step = std::min(dt, window_end - t);
            local.set_dt(step);
            op.apply_nonlocal_into(u, flux);
            trial = u + step * (flux + problem.reaction().value(u));
            local.solve_in_place(trial);
            if (!trial.allFinite() || trial.minCoeff() < 0.0) {
                dt *= 0.5;
                if (dt < detail::kMinDt) {
                    std::ostringstream msg;
                    msg << "single-species march: step size collapsed below " << detail::kMinDt << " at t=" << t;
                    throw Error(ErrorKind::Numerical, msg.str());
                }
                continue;
            }
            u.swap(trial);
            t += step;
            ++out.steps;
        }
        t = window_end;
        record();
        const double change = (u - window_start).cwiseAbs().maxCoeff();
        if (detector.update(change, u.cwiseAbs().maxCoeff())) {
            out.converged = true;
            if (options.stop_on_convergence) {
                break;
            }
        }
    }

    out.final = u;
    out.t_final = t;
    out.dt = dt;
    if (steady) {
        out.sup_dist_to_steady = (u - *steady).cwiseAbs().maxCoeff();
    }
    return out;
}

namespace {

/// Newton refinement of a converged march; keeps the iterate only while the
/// residual shrinks and the state stays positive.
StateField newton_polish(const SingleSpeciesProblem& problem, StateField u) {
    const Eigen::MatrixXd a = problem.op().dense_matrix();
    double best = problem.residual(u).cwiseAbs().maxCoeff();
    for (int it = 0; it < 8 && best > 1e-15; ++it) {
        Eigen::MatrixXd jac = a;
        jac.diagonal() += problem.reaction().derivative(u);
        const StateField delta = jac.partialPivLu().solve(-problem.residual(u));
        const StateField next = u + delta;
        if (!next.allFinite() || next.minCoeff() <= 0.0) {
            break;
        }
        const double res = problem.residual(next).cwiseAbs().maxCoeff();
        if (!(res < best)) {
            break;
        }
        u = next;
        best = res;
    }
    return u;
}

}  // namespace

SteadyStateResult solve_steady_state(const SingleSpeciesProblem& problem) {
    SteadyStateResult result;
    const SpectralReport spectrum = spectral_bound(problem.op(), problem.growth());
    result.lambda_star = spectrum.bound;
    if (std::abs(result.lambda_star) <= kLambdaThreshold) {
        result.degenerate = true;
        return result;
    }
    if (result.lambda_star < 0.0) {
        return result;
    }

    const auto n = static_cast<Eigen::Index>(problem.op().grid().size());
    MarchOptions options;
    const StateField from_above = StateField::Constant(n, upper_solution_level(problem));
    const StateField from_below = 1e-3 * positive_surrogate(*spectrum.eigvec);

    const SingleTrajectory upper = time_march_single(problem, from_above, options.max_time, options);
    const SingleTrajectory lower = time_march_single(problem, from_below, options.max_time, options);
    if (!upper.converged || !lower.converged) {
        throw Error(ErrorKind::Numerical, "steady state: monotone marches did not converge");
    }
    result.iterations = upper.steps + lower.steps;
    result.uniqueness_gap = (upper.final - lower.final).cwiseAbs().maxCoeff();
    result.upper_limit = upper.final;
    result.lower_limit = lower.final;

    const double scale = upper.final.cwiseAbs().maxCoeff();
    if (result.uniqueness_gap > 1e-6 * scale) {
        std::ostringstream msg;
        msg << "steady state: from-above and from-below limits differ by " << result.uniqueness_gap
            << " (uniqueness violated at this discretization)";
        throw Error(ErrorKind::Numerical, msg.str());
    }

    StateField state = newton_polish(problem, 0.5 * (upper.final + lower.final));
    result.residual = problem.residual(state).cwiseAbs().maxCoeff();
    if (state.minCoeff() <= 0.0 || result.residual >= 1e-8 * (1.0 + state.cwiseAbs().maxCoeff())) {
        throw Error(ErrorKind::Numerical, "steady state: limit is not a positive fixed point");
    }
    result.exists = true;
    result.state = std::move(state);
    return result;
}

}  // namespace nlcomp
