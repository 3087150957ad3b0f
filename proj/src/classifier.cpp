#include "nlcomp/classifier.hpp"

#include "nlcomp/error.hpp"
#include "nlcomp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

namespace nlcomp {

namespace {

double sup(const Eigen::VectorXd& x) { return x.cwiseAbs().maxCoeff(); }

double relative_spread(const PotentialField& f) {
    const double hi = f.maxCoeff();
    const double lo = f.minCoeff();
    return (hi - lo) / std::max(std::abs(hi), std::numeric_limits<double>::min());
}

SingleSpeciesProblem u_problem(const ModelParams& p) { return SingleSpeciesProblem::logistic(p.op_u, p.m, p.b1); }
SingleSpeciesProblem v_problem(const ModelParams& p) { return SingleSpeciesProblem::logistic(p.op_v, p.M, p.c1); }

}  // namespace

const char* to_string(CaseKind kind) {
    switch (kind) {
    case CaseKind::BothUnstable:
        return "both_unstable";
    case CaseKind::USemitrivialUnstable:
        return "u_semitrivial_unstable";
    case CaseKind::VSemitrivialUnstable:
        return "v_semitrivial_unstable";
    case CaseKind::Degenerate:
        return "degenerate";
    }
    return "?";
}

const char* to_string(Prediction prediction) {
    switch (prediction) {
    case Prediction::UniqueCoexistence:
        return "unique_coexistence_GAS";
    case Prediction::VWins:
        return "v_wins_GAS";
    case Prediction::UWins:
        return "u_wins_GAS";
    case Prediction::Continuum:
        return "continuum_convergence";
    case Prediction::None:
        return "none";
    }
    return "?";
}

const char* to_string(ClassStatus status) {
    switch (status) {
    case ClassStatus::Ok:
        return "ok";
    case ClassStatus::InconsistentDegenerate:
        return "inconsistent_degenerate";
    case ClassStatus::BoundaryUndetermined:
        return "boundary_undetermined";
    }
    return "?";
}

SemiTrivialStates solve_semi_trivial(const ModelParams& params) {
    params.validate();
    return {solve_steady_state(u_problem(params)), solve_steady_state(v_problem(params))};
}

StabilityExponents stability_exponents(const ModelParams& params, const StateField& u_d, const StateField& v_D) {
    params.validate();
    const auto n = static_cast<Eigen::Index>(params.size());
    if (u_d.size() != n || v_D.size() != n) {
        throw Error(ErrorKind::Contract, "stability_exponents: semi-trivial states do not live on the model grid");
    }
    const double res_u = sup(u_problem(params).residual(u_d));
    const double res_v = sup(v_problem(params).residual(v_D));
    if (!(res_u < 1e-8 * (1.0 + sup(u_d))) || !(res_v < 1e-8 * (1.0 + sup(v_D)))) {
        std::ostringstream msg;
        msg << "stability_exponents: inputs are not steady states (residuals " << res_u << ", " << res_v << ")";
        throw Error(ErrorKind::Contract, msg.str());
    }
    StabilityExponents e;
    e.mu_report = spectral_bound(*params.op_v, params.M - params.b.cwiseProduct(u_d));
    e.nu_report = spectral_bound(*params.op_u, params.m - params.c.cwiseProduct(v_D));
    e.mu = e.mu_report.bound;
    e.nu = e.nu_report.bound;
    e.neutral_band = 1e-8 * (1.0 + sup(params.M) + sup(params.m));
    return e;
}

ClassificationOutcome classify(const ModelParams& params) {
    params.validate();
    if (!params.weak_competition()) {
        std::ostringstream msg;
        msg << "classification needs weak competition: max b * max c = " << params.competition_product()
            << " exceeds min b1 * min c1 = " << params.self_product();
        throw Error(ErrorKind::Unsupported, msg.str());
    }
    return classify(params, solve_semi_trivial(params));
}

ClassificationOutcome classify(const ModelParams& params, const SemiTrivialStates& semi) {
    params.validate();
    if (!params.weak_competition()) {
        std::ostringstream msg;
        msg << "classification needs weak competition: max b * max c = " << params.competition_product()
            << " exceeds min b1 * min c1 = " << params.self_product();
        throw Error(ErrorKind::Unsupported, msg.str());
    }
    if (params.op_u->max_abs_asymmetry() != 0.0 || params.op_v->max_abs_asymmetry() != 0.0) {
        throw Error(ErrorKind::Unsupported, "classification needs symmetric kernels");
    }
    auto require = [](const SteadyStateResult& r, const char* name) {
        if (!r.exists) {
            std::ostringstream msg;
            msg << "semi-trivial state " << name << " does not exist (lambda* = " << r.lambda_star
                << (r.degenerate ? ", inside the neutral band" : " <= 0") << ")";
            throw Error(ErrorKind::Hypothesis, msg.str());
        }
    };
    require(semi.u, "u_d");
    require(semi.v, "v_D");

    ClassificationOutcome out;
    out.u_d = *semi.u.state;
    out.v_D = *semi.v.state;
    out.exponents = stability_exponents(params, out.u_d, out.v_D);

    ClassificationEvidence& ev = out.evidence;
    ev.mu = out.exponents.mu;
    ev.nu = out.exponents.nu;
    ev.neutral_band = out.exponents.neutral_band;
    ev.competition_product = params.competition_product();
    ev.self_product = params.self_product();
    ev.state_gap = sup(params.b.cwiseProduct(out.u_d) - params.c1.cwiseProduct(out.v_D));
    ev.state_scale = sup(params.c1.cwiseProduct(out.v_D));
    ev.coefficient_spread = std::max({relative_spread(params.b), relative_spread(params.c),
                                      relative_spread(params.b1), relative_spread(params.c1)});
    ev.certificate = std::abs(ev.competition_product - ev.self_product) <= 1e-8 &&
                     ev.state_gap <= 1e-6 * ev.state_scale && ev.coefficient_spread <= 1e-10;

    const double band = ev.neutral_band;
    const bool mu_pos = ev.mu > band;
    const bool nu_pos = ev.nu > band;
    const bool mu_neutral = std::abs(ev.mu) <= band;
    const bool nu_neutral = std::abs(ev.nu) <= band;

    if (mu_pos && nu_pos) {
        out.kind = CaseKind::BothUnstable;
        out.prediction = Prediction::UniqueCoexistence;
    } else if (mu_pos) {
        out.kind = CaseKind::USemitrivialUnstable;
        out.prediction = Prediction::VWins;
        if (nu_neutral) {
            out.status = ClassStatus::BoundaryUndetermined;
        }
    } else if (nu_pos) {
        out.kind = CaseKind::VSemitrivialUnstable;
        out.prediction = Prediction::UWins;
        if (mu_neutral) {
            out.status = ClassStatus::BoundaryUndetermined;
        }
    } else {
        out.kind = CaseKind::Degenerate;
        if (mu_neutral && nu_neutral && ev.certificate) {
            out.prediction = Prediction::Continuum;
        } else {
            out.status = ClassStatus::InconsistentDegenerate;
        }
    }
    return out;
}

LimitType expected_limit(Prediction prediction) {
    switch (prediction) {
    case Prediction::UniqueCoexistence:
        return LimitType::Coexist;
    case Prediction::VWins:
        return LimitType::VWins;
    case Prediction::UWins:
        return LimitType::UWins;
    case Prediction::Continuum:
        return LimitType::ContinuumPoint;
    case Prediction::None:
        return LimitType::Undecided;
    }
    return LimitType::Undecided;
}

AttractorSet attractors_for(const ClassificationOutcome& outcome) {
    AttractorSet set;
    set.u_d = outcome.u_d;
    set.v_D = outcome.v_D;
    set.continuum = outcome.prediction == Prediction::Continuum;
    return set;
}

std::vector<SystemState> random_initial_states(const ModelParams& params, int count, std::uint64_t seed) {
    const auto n = static_cast<Eigen::Index>(params.size());
    const double cap = std::max({params.m.maxCoeff(), params.M.maxCoeff(), 0.1});
    Rng rng(seed);
    std::vector<SystemState> states;
    states.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int k = 0; k < count; ++k) {
        const double au = rng.uniform(0.05, 1.0) * cap;
        const double av = rng.uniform(0.05, 1.0) * cap;
        SystemState s;
        s.u.resize(n);
        s.v.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            s.u[i] = au * (0.5 + 0.5 * rng.uniform());
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            s.v[i] = av * (0.5 + 0.5 * rng.uniform());
        }
        states.push_back(std::move(s));
    }
    return states;
}

VerificationReport verify_prediction(const ModelParams& params, const ClassificationOutcome& outcome,
                                     const VerifyOptions& options) {
    VerificationReport report;
    report.prediction = outcome.prediction;
    AttractorSet set = attractors_for(outcome);

    if (outcome.kind == CaseKind::BothUnstable) {
        const double scale =
            1.0 + params.b.maxCoeff() * outcome.u_d.maxCoeff() + params.c.maxCoeff() * outcome.v_D.maxCoeff();
        double size = 0.25 * std::min(outcome.exponents.mu, outcome.exponents.nu) / scale;
        for (int attempt = 0; attempt < 30 && !report.bracket; ++attempt, size *= 0.5) {
            try {
                report.bracket =
                    monotone_bracket(params, outcome.u_d, outcome.v_D, size, size, options.bracket_horizon);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Contract) {
                    report.bracket_error = e.what();
                    break;
                }
                report.bracket_error = e.what();
            }
        }
        if (report.bracket) {
            report.bracket_error.clear();
            const BracketReport& b = *report.bracket;
            set.coexistence = SystemState{0.5 * (b.upper_limit.u + b.lower_limit.u),
                                          0.5 * (b.upper_limit.v + b.lower_limit.v), 0.0};
            if (!b.certified) {
                std::ostringstream note;
                note << "bracket limits differ by " << b.distance;
                report.notes.push_back(note.str());
            }
        } else {
            report.notes.push_back("monotone bracket failed: " + report.bracket_error);
        }
    }

    SimulationControls controls;
    controls.horizon = options.horizon;
    controls.classify_threshold = options.classify_threshold;
    controls.attractors = set;

    const std::vector<SystemState> inits = random_initial_states(params, options.n_inits, options.seed);
    std::vector<std::future<SimulationOutcome>> jobs;
    jobs.reserve(inits.size());
    for (const SystemState& init : inits) {
        jobs.push_back(std::async(std::launch::async, [&params, &controls, &init] {
            return simulate(params, init, controls);
        }));
    }

    const LimitType expected = expected_limit(outcome.prediction);
    for (std::size_t k = 0; k < inits.size(); ++k) {
        VerificationRun run;
        run.init = inits[k];
        try {
            run.outcome = jobs[k].get();
        } catch (const Error& e) {
            std::ostringstream note;
            note << "run " << k << ": " << e.what();
            report.notes.push_back(note.str());
            report.runs.push_back(std::move(run));
            ++report.total;
            continue;
        }
        run.matches = expected != LimitType::Undecided && run.outcome.limit_type == expected;
        report.max_residual = std::max(report.max_residual, run.outcome.residual);
        if (run.outcome.limit_type == LimitType::ContinuumPoint && run.outcome.s_estimate) {
            report.s_estimates.push_back(*run.outcome.s_estimate);
        }
        if (!run.matches) {
            std::ostringstream note;
            note << "run " << k << ": limit " << to_string(run.outcome.limit_type) << " at distance "
                 << run.outcome.attractor_distance << ", residual " << run.outcome.residual;
            if (!run.outcome.trend.empty()) {
                note << " (" << run.outcome.trend << ")";
            }
            report.notes.push_back(note.str());
        }
        report.matches += run.matches ? 1 : 0;
        ++report.total;
        report.runs.push_back(std::move(run));
    }
    if (!report.s_estimates.empty()) {
        const auto [lo, hi] = std::minmax_element(report.s_estimates.begin(), report.s_estimates.end());
        report.s_spread = *hi - *lo;
    }
    return report;
}

ContinuumTable continuum_check(const ModelParams& params, const StateField& u_d, const StateField& v_D,
                               const std::vector<double>& s_samples) {
    params.validate();
    ContinuumTable table;
    table.tolerance = 1e-8 * (1.0 + sup(u_d));
    table.certificate = std::abs(params.competition_product() - params.self_product()) <= 1e-8 &&
                        sup(params.b.cwiseProduct(u_d) - params.c1.cwiseProduct(v_D)) <=
                            1e-6 * sup(params.c1.cwiseProduct(v_D));
    if (!table.certificate) {
        table.advisory = "continuum check run without the degenerate certificate";
    }
    table.all_pass = true;
    for (double s : s_samples) {
        if (!(s >= 0.0 && s <= 1.0)) {
            throw Error(ErrorKind::Contract, "continuum_check: s samples must lie in [0, 1]");
        }
        const SystemState r = system_rhs(params, {s * u_d, (1.0 - s) * v_D, 0.0});
        ContinuumRow row{s, sup(r.u), sup(r.v)};
        table.all_pass = table.all_pass && row.residual_u < table.tolerance && row.residual_v < table.tolerance;
        table.rows.push_back(row);
    }
    return table;
}

NonexistenceReport nonexistence_probe(const ModelParams& params, const StateField& u_d, const StateField& v_D,
                                      const StabilityExponents& exponents) {
    const double h = params.grid().weight();
    const Eigen::ArrayXd u = u_d.array();
    const Eigen::ArrayXd v = v_D.array();
    const Eigen::ArrayXd bu = params.b.array() * u;
    const Eigen::ArrayXd cv = params.c1.array() * v;

    NonexistenceReport r;
    r.i1 = h * (cv * v.square() - bu * v.square()).sum();
    r.i2 = h * (params.b1.array() * u.cube() - params.c.array() * v * u.square()).sum();
    r.combined = h * ((bu - cv).square() * (bu + cv)).sum();
    r.mu_implication = exponents.mu > 0.0 || r.i1 <= 1e-10;
    r.nu_implication = exponents.nu > 0.0 || r.i2 <= 1e-10;
    r.consistent = r.mu_implication && r.nu_implication;
    return r;
}

}  // namespace nlcomp
