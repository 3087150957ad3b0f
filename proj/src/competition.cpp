#include "nlcomp/competition.hpp"

#include "nlcomp/error.hpp"
#include "nlcomp/spectral.hpp"
#include "stepping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nlcomp {

namespace {

double sup(const Eigen::VectorXd& x) { return x.cwiseAbs().maxCoeff(); }

void require_same_size(const PotentialField& f, Eigen::Index n, const char* name) {
    if (f.size() != n) {
        throw Error(ErrorKind::Config, std::string("coefficient '") + name + "' does not live on the model grid");
    }
    if (!f.allFinite()) {
        throw Error(ErrorKind::Config, std::string("coefficient '") + name + "' has non-finite values");
    }
}

void require_state(const ModelParams& params, const SystemState& s, const char* what) {
    const auto n = static_cast<Eigen::Index>(params.size());
    if (s.u.size() != n || s.v.size() != n) {
        throw Error(ErrorKind::Contract, std::string(what) + ": state does not live on the model grid");
    }
    if (!s.u.allFinite() || !s.v.allFinite() || s.u.minCoeff() < 0.0 || s.v.minCoeff() < 0.0) {
        throw Error(ErrorKind::Contract, std::string(what) + ": state must be finite and nonnegative");
    }
}

}  // namespace

ModelParams ModelParams::lotka_volterra(std::shared_ptr<const DispersalOperator> op_u,
                                        std::shared_ptr<const DispersalOperator> op_v, PotentialField m,
                                        PotentialField M, double b, double c) {
    const auto n = m.size();
    ModelParams p;
    p.op_u = std::move(op_u);
    p.op_v = std::move(op_v);
    p.m = std::move(m);
    p.M = std::move(M);
    p.b = PotentialField::Constant(n, b);
    p.c = PotentialField::Constant(n, c);
    p.b1 = PotentialField::Ones(n);
    p.c1 = PotentialField::Ones(n);
    p.validate();
    return p;
}

void ModelParams::validate() const {
    if (!op_u || !op_v) {
        throw Error(ErrorKind::Config, "model needs both dispersal operators");
    }
    if (!op_u->grid().same_as(op_v->grid())) {
        throw Error(ErrorKind::Config, "the two dispersal operators live on different grids");
    }
    const auto n = static_cast<Eigen::Index>(size());
    require_same_size(m, n, "m");
    require_same_size(M, n, "M");
    require_same_size(b, n, "b");
    require_same_size(c, n, "c");
    require_same_size(b1, n, "b1");
    require_same_size(c1, n, "c1");
    if (b.minCoeff() <= 0.0 || c.minCoeff() <= 0.0 || b1.minCoeff() <= 0.0 || c1.minCoeff() <= 0.0) {
        throw Error(ErrorKind::Config, "competition and self-regulation coefficients must be positive");
    }
}

bool ModelParams::weak_competition() const {
    return competition_product() <= self_product() * (1.0 + 1e-12);
}

SystemState system_rhs(const ModelParams& p, const SystemState& s) {
    SystemState r;
    r.t = s.t;
    r.u = p.op_u->apply(s.u) + s.u.cwiseProduct(p.m - p.b1.cwiseProduct(s.u) - p.c.cwiseProduct(s.v));
    r.v = p.op_v->apply(s.v) + s.v.cwiseProduct(p.M - p.b.cwiseProduct(s.u) - p.c1.cwiseProduct(s.v));
    return r;
}

double steady_residual(const ModelParams& params, const SystemState& state) {
    const SystemState r = system_rhs(params, state);
    return std::max(sup(r.u), sup(r.v));
}

bool competitively_le(const SystemState& a, const SystemState& b, double slack) {
    return (a.u.array() <= b.u.array() + slack).all() && (a.v.array() >= b.v.array() - slack).all();
}

OrderFractions order_fractions(const SystemState& state, const StateField& u_ref, const StateField& v_ref) {
    if (u_ref.size() != state.u.size() || v_ref.size() != state.v.size()) {
        throw Error(ErrorKind::Contract, "order_fractions: reference size mismatch");
    }
    if (!(u_ref.minCoeff() > 0.0) || !(v_ref.minCoeff() > 0.0)) {
        throw Error(ErrorKind::Contract, "order_fractions: references must be strictly positive");
    }
    const Eigen::ArrayXd ru = state.u.array() / u_ref.array();
    const Eigen::ArrayXd rv = state.v.array() / v_ref.array();
    return {std::min(ru.minCoeff(), 1.0 - rv.maxCoeff()), std::max(ru.maxCoeff(), 1.0 - rv.minCoeff())};
}

EnergyDiagnostics energy_residual(const SystemState& state, const ModelParams& params, const StateField& u_d,
                                  const StateField& v_D, double s) {
    const double h = params.grid().weight();
    const StateField w = state.u - s * u_d;
    const StateField z = state.v - (1.0 - s) * v_D;
    EnergyDiagnostics out;
    out.energy = h * (w + params.c.cwiseProduct(z)).squaredNorm();
    out.energy_direct = h * (state.u + params.c.cwiseProduct(state.v) - u_d).squaredNorm();
    out.s_independent = std::abs(out.energy - out.energy_direct) <= 1e-12 * (1.0 + out.energy_direct);

    const bool product_one = std::abs(params.competition_product() - params.self_product()) <= 1e-8;
    const double gap = sup(params.b.cwiseProduct(u_d) - params.c1.cwiseProduct(v_D));
    out.degenerate_config = product_one && gap <= 1e-6 * sup(v_D);
    if (!out.degenerate_config) {
        out.advisory = "energy evaluated outside the degenerate configuration (bc != 1 or b u_d != v_D)";
    }
    return out;
}

SymmetrizationGap symmetrization_gap(const DispersalOperator& op, const StateField& u, const StateField& u_star) {
    if (op.has_local_part() || op.mix() != 1.0) {
        throw Error(ErrorKind::Contract, "symmetrization_gap: operator must be purely nonlocal");
    }
    if (op.regime().tag == BoundaryRegime::Tag::Hostile) {
        throw Error(ErrorKind::Contract, "symmetrization_gap: needs the noflux or periodic regime");
    }
    if (op.max_abs_asymmetry() != 0.0) {
        throw Error(ErrorKind::Contract, "symmetrization_gap: kernel matrix is not symmetric");
    }
    const auto n = static_cast<Eigen::Index>(op.grid().size());
    if (u.size() != n || u_star.size() != n) {
        throw Error(ErrorKind::Contract, "symmetrization_gap: fields do not live on the operator's grid");
    }
    if (!(u.minCoeff() > 0.0) || !(u_star.minCoeff() > 0.0)) {
        throw Error(ErrorKind::Contract, "symmetrization_gap: fields must be strictly positive");
    }

    const double h = op.grid().weight();
    const StateField ku = op.kernel_action(u);
    const StateField ku_star = op.kernel_action(u_star);

    SymmetrizationGap out;
    const Eigen::ArrayXd diff = (u - u_star).array();
    out.lhs = h * ((-u.array() * ku_star.array() + u_star.array() * ku.array()) * diff.square() /
                   (u.array() * u_star.array()))
                      .sum();

    const auto& kmat = op.kmat();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double cross = u_star[i] * u[j] - u[i] * u_star[j];
            total += kmat(i, j) * cross * cross * (1.0 / (u[i] * u[j]) - 1.0 / (u_star[i] * u_star[j]));
        }
    }
    out.rhs = 0.5 * h * total;

    out.ordered = (u.array() > u_star.array()).all();
    out.sign_ok = !out.ordered || (out.lhs <= 0.0 && out.rhs <= 0.0);
    return out;
}

const char* to_string(LimitType type) {
    switch (type) {
    case LimitType::UWins:
        return "u_wins";
    case LimitType::VWins:
        return "v_wins";
    case LimitType::Coexist:
        return "coexist";
    case LimitType::ContinuumPoint:
        return "continuum_point";
    case LimitType::Undecided:
        return "undecided";
    }
    return "?";
}

double distance_to_continuum(const SystemState& state, const StateField& u_d, const StateField& v_D) {
    auto dist = [&](double s) {
        return std::max(sup(state.u - s * u_d), sup(state.v - (1.0 - s) * v_D));
    };
    // max of two convex functions of s: ternary search
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double a = lo + (hi - lo) / 3.0;
        const double b = hi - (hi - lo) / 3.0;
        if (dist(a) <= dist(b)) {
            hi = b;
        } else {
            lo = a;
        }
    }
    return dist(0.5 * (lo + hi));
}

LimitClassification classify_limit(const SystemState& state, const AttractorSet& set, double threshold) {
    struct Candidate {
        LimitType type;
        double distance;
    };
    std::vector<Candidate> candidates;
    if (set.continuum) {
        if (!set.u_d || !set.v_D) {
            throw Error(ErrorKind::Contract, "continuum candidate needs both semi-trivial states");
        }
        candidates.push_back({LimitType::ContinuumPoint, distance_to_continuum(state, *set.u_d, *set.v_D)});
    } else {
        if (set.u_d) {
            candidates.push_back({LimitType::UWins, std::max(sup(state.u - *set.u_d), sup(state.v))});
        }
        if (set.v_D) {
            candidates.push_back({LimitType::VWins, std::max(sup(state.u), sup(state.v - *set.v_D))});
        }
    }
    if (set.coexistence) {
        candidates.push_back({LimitType::Coexist, std::max(sup(state.u - set.coexistence->u),
                                                           sup(state.v - set.coexistence->v))});
    }

    LimitClassification out;
    if (candidates.empty()) {
        out.distance = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });
    out.distance = candidates.front().distance;

    if (set.continuum) {
        const StateField& u_d = *set.u_d;
        const StateField& v_D = *set.v_D;
        const double s_u = state.u.dot(u_d) / u_d.squaredNorm();
        const double s_v = 1.0 - state.v.dot(v_D) / v_D.squaredNorm();
        out.s_estimate = s_u;
        if (std::abs(s_u - s_v) > 1e-4) {
            return out;
        }
    }
    if (candidates.front().distance > threshold) {
        return out;
    }
    if (candidates.size() > 1 && candidates[1].distance <= threshold) {
        return out;  // tie
    }
    out.type = candidates.front().type;
    return out;
}

namespace {

double stiffness(const ModelParams& p) {
    const double growth = std::max(sup(p.m), sup(p.M));
    const double cap = growth + 1.0;
    return p.op_u->rate() * p.op_u->adiag().maxCoeff() + p.op_v->rate() * p.op_v->adiag().maxCoeff() + sup(p.m) +
           sup(p.M) + 2.0 * (p.b.maxCoeff() + p.c.maxCoeff() + p.b1.maxCoeff() + p.c1.maxCoeff()) * cap;
}

TimeSeriesRow make_row(const ModelParams& p, const SystemState& s, const AttractorSet& set, double threshold) {
    const double h = p.grid().weight();
    TimeSeriesRow row;
    row.t = s.t;
    row.l2_u = std::sqrt(h * s.u.squaredNorm());
    row.l2_v = std::sqrt(h * s.v.squaredNorm());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.theta = row.eta = row.energy = nan;
    if (set.u_d && set.v_D && set.u_d->minCoeff() > 0.0 && set.v_D->minCoeff() > 0.0) {
        const OrderFractions f = order_fractions(s, *set.u_d, *set.v_D);
        row.theta = f.theta;
        row.eta = f.eta;
        row.energy = energy_residual(s, p, *set.u_d, *set.v_D, 0.0).energy;
    }
    row.sup_dist = classify_limit(s, set, threshold).distance;
    return row;
}

}  // namespace

SimulationOutcome simulate(const ModelParams& params, const SystemState& init, const SimulationControls& controls) {
    params.validate();
    require_state(params, init, "simulate");

    const auto n = static_cast<Eigen::Index>(params.size());
    const DispersalOperator& op_u = *params.op_u;
    const DispersalOperator& op_v = *params.op_v;

    SimulationOutcome out;
    double dt = 1.0 / static_cast<double>(detail::steps_per_unit(stiffness(params)));
    detail::LocalSolver local_u(op_u);
    detail::LocalSolver local_v(op_v);
    detail::ConvergenceDetector detector(controls.convergence_tolerance, controls.convergence_windows);

    SystemState s = init;
    StateField flux_u(n), flux_v(n), next_u(n), next_v(n);
    std::vector<double> residual_trend;

    auto sample = [&] {
        out.series.push_back(make_row(params, s, controls.attractors, controls.classify_threshold));
        if (controls.record_states) {
            out.snapshots.push_back(s);
        }
        if (out.series.back().l2_u < 1e-8 && out.series.back().l2_v < 1e-8) {
            out.both_vanished = true;
        }
    };
    sample();

    while (s.t < controls.horizon - 1e-12) {
        const StateField start_u = s.u;
        const StateField start_v = s.v;
        const double window_end = std::min(std::floor(s.t + 1e-9) + 1.0, controls.horizon);
        while (s.t < window_end - 1e-12) {
            const double step = std::min(dt, window_end - s.t);
            local_u.set_dt(step);
            local_v.set_dt(step);
            op_u.apply_nonlocal_into(s.u, flux_u);
            op_v.apply_nonlocal_into(s.v, flux_v);
            next_u = s.u + step * (flux_u + s.u.cwiseProduct(params.m - params.b1.cwiseProduct(s.u) -
                                                              params.c.cwiseProduct(s.v)));
            next_v = s.v + step * (flux_v + s.v.cwiseProduct(params.M - params.b.cwiseProduct(s.u) -
                                                              params.c1.cwiseProduct(s.v)));
            local_u.solve_in_place(next_u);
            local_v.solve_in_place(next_v);
            if (!next_u.allFinite() || !next_v.allFinite() || next_u.minCoeff() < 0.0 || next_v.minCoeff() < 0.0) {
                dt *= 0.5;
                if (dt < detail::kMinDt) {
                    std::ostringstream msg;
                    msg << "simulate: step size collapsed below " << detail::kMinDt << " at t=" << s.t;
                    throw Error(ErrorKind::Numerical, msg.str());
                }
                continue;
            }
            s.u.swap(next_u);
            s.v.swap(next_v);
            s.t += step;
            ++out.steps;
        }
        s.t = window_end;
        sample();
        const double change = std::max(sup(s.u - start_u), sup(s.v - start_v));
        if (detector.update(change, std::max(sup(s.u), sup(s.v))) && controls.stop_on_convergence) {
            break;
        }
        if (residual_trend.size() < 4 || std::fmod(s.t, 10.0) < 1e-9) {
            residual_trend.push_back(steady_residual(params, s));
        }
    }

    out.final = s;
    out.dt = dt;
    out.residual = steady_residual(params, s);
    out.converged = out.residual < 1e-6;
    const LimitClassification limit = classify_limit(s, controls.attractors, controls.classify_threshold);
    out.limit_type = out.converged ? limit.type : LimitType::Undecided;
    out.s_estimate = limit.s_estimate;
    out.attractor_distance = limit.distance;
    if (!out.converged) {
        std::ostringstream trend;
        trend << "residual " << out.residual << " at t=" << s.t << "; recent residuals:";
        const std::size_t first = residual_trend.size() > 5 ? residual_trend.size() - 5 : 0;
        for (std::size_t i = first; i < residual_trend.size(); ++i) {
            trend << ' ' << residual_trend[i];
        }
        out.trend = trend.str();
    }
    return out;
}

BracketReport monotone_bracket(const ModelParams& params, const StateField& u_d, const StateField& v_D,
                               double delta, double eps, double horizon) {
    params.validate();
    if (!params.weak_competition()) {
        throw Error(ErrorKind::Unsupported, "monotone_bracket: needs weak competition (max b * max c <= min b1 * min c1)");
    }
    if (!(delta > 0.0) || !(eps > 0.0)) {
        throw Error(ErrorKind::Contract, "monotone_bracket: delta and eps must be strictly positive");
    }
    const SpectralReport mu = spectral_bound(*params.op_v, params.M - params.b.cwiseProduct(u_d));
    const SpectralReport nu = spectral_bound(*params.op_u, params.m - params.c.cwiseProduct(v_D));
    if (!(mu.bound > 0.0) || !(nu.bound > 0.0)) {
        throw Error(ErrorKind::Contract, "monotone_bracket: both semi-trivial states must be linearly unstable");
    }
    const StateField psi = positive_surrogate(*mu.eigvec);
    const StateField phi = positive_surrogate(*nu.eigvec);

    BracketReport report;
    report.upper_start = {(1.0 + delta) * u_d, eps * psi, 0.0};
    report.lower_start = {eps * phi, (1.0 + delta) * v_D, 0.0};

    const SystemState ru = system_rhs(params, report.upper_start);
    const SystemState rl = system_rhs(params, report.lower_start);
    if (ru.u.maxCoeff() > 0.0 || ru.v.minCoeff() < 0.0) {
        throw Error(ErrorKind::Contract, "monotone_bracket: upper seed is not an upper solution (reduce delta, eps)");
    }
    if (rl.u.minCoeff() < 0.0 || rl.v.maxCoeff() > 0.0) {
        throw Error(ErrorKind::Contract, "monotone_bracket: lower seed is not a lower solution (reduce delta, eps)");
    }

    SimulationControls controls;
    controls.horizon = horizon;
    controls.record_states = true;
    const SimulationOutcome upper = simulate(params, report.upper_start, controls);
    const SimulationOutcome lower = simulate(params, report.lower_start, controls);

    constexpr double slack = 1e-10;
    auto check = [&](const std::vector<SystemState>& snaps, bool decreasing) {
        for (std::size_t k = 1; k < snaps.size(); ++k) {
            const SystemState& prev = snaps[k - 1];
            const SystemState& next = snaps[k];
            // decreasing in competitive order: next <=_c prev
            const double du = decreasing ? (next.u - prev.u).maxCoeff() : (prev.u - next.u).maxCoeff();
            const double dv = decreasing ? (prev.v - next.v).maxCoeff() : (next.v - prev.v).maxCoeff();
            report.max_monotonicity_violation = std::max({report.max_monotonicity_violation, du, dv});
            if (du > slack || dv > slack) {
                std::ostringstream msg;
                msg << "monotone_bracket: " << (decreasing ? "upper" : "lower")
                    << " trajectory lost monotonicity at t=" << next.t << " (violation " << std::max(du, dv) << ")";
                throw Error(ErrorKind::Numerical, msg.str());
            }
        }
    };
    check(upper.snapshots, true);
    check(lower.snapshots, false);

    report.samples = static_cast<long>(upper.snapshots.size() + lower.snapshots.size());
    report.upper_limit = upper.final;
    report.lower_limit = lower.final;
    report.distance = std::max(sup(upper.final.u - lower.final.u), sup(upper.final.v - lower.final.v));
    report.certified = report.distance <= 1e-6 && upper.converged && lower.converged;
    return report;
}

bool comparison_check(const ModelParams& params, const SystemState& init_a, const SystemState& init_b,
                      double horizon) {
    if (!competitively_le(init_a, init_b)) {
        throw Error(ErrorKind::Contract, "comparison_check: initial states are not ordered (need a <=_c b)");
    }
    SimulationControls controls;
    controls.horizon = horizon;
    controls.stop_on_convergence = false;
    controls.record_states = true;
    const SimulationOutcome a = simulate(params, init_a, controls);
    const SimulationOutcome b = simulate(params, init_b, controls);
    const std::size_t count = std::min(a.snapshots.size(), b.snapshots.size());
    for (std::size_t k = 0; k < count; ++k) {
        if (!competitively_le(a.snapshots[k], b.snapshots[k], 1e-10)) {
            return false;
        }
    }
    return true;
}

}  // namespace nlcomp
