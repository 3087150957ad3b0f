#include "acceptance.hpp"

#include "oracles.hpp"

#include "nlcomp/classifier.hpp"
#include "nlcomp/error.hpp"
#include "nlcomp/rng.hpp"
#include "nlcomp/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace nlcomp::acceptance {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sup(const Eigen::VectorXd& x) { return x.cwiseAbs().maxCoeff(); }

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

/// Collects comparisons for one criterion. In broken mode every bound becomes
/// unsatisfiable so the criterion must fail.
class Checker {
public:
    explicit Checker(bool broken) : broken_(broken) {}

    bool le(double value, double bound) {
        const bool ok = !broken_ && value <= bound;
        ok_ = ok_ && ok;
        return ok;
    }

    bool ge(double value, double bound) {
        const bool ok = !broken_ && value >= bound;
        ok_ = ok_ && ok;
        return ok;
    }

    bool gt(double value, double bound) {
        const bool ok = !broken_ && value > bound;
        ok_ = ok_ && ok;
        return ok;
    }

    bool require(bool condition, const std::string& why) {
        if (!condition) {
            ok_ = false;
            note(why);
        }
        return condition;
    }

    void note(const std::string& text) { detail_ << (detail_.tellp() > 0 ? " " : "") << text; }

    bool ok() const { return ok_; }
    std::string detail() const { return detail_.str(); }

private:
    bool broken_;
    bool ok_ = true;
    std::ostringstream detail_;
};

Eigen::VectorXd profile(const SpatialGrid& g, const std::function<double(double)>& f) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) {
        out[static_cast<Eigen::Index>(i)] = f(g.node(i));
    }
    return out;
}

std::shared_ptr<const DispersalOperator> make_op(const KernelSpec& k, const SpatialGrid& g, double rate,
                                                 double mix = 1.0,
                                                 BoundaryRegime regime = BoundaryRegime::no_flux()) {
    return std::make_shared<const DispersalOperator>(assemble_dispersal(k, g, regime, rate, mix));
}

ModelParams constant_model(std::size_t n, double b, double c, double alpha = 1.0, double beta = 1.0) {
    const SpatialGrid g = build_grid(0.0, 1.0, n);
    const KernelSpec k = KernelSpec::gaussian(0.1);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    return ModelParams::lotka_volterra(make_op(k, g, 1.0, alpha), make_op(k, g, 1.0, beta), one, one, b, c);
}

/// b = c = 1, m = M = 1 + 0.3 cos(2 pi x), one kernel for both species.
ModelParams degenerate_model(std::size_t n) {
    const SpatialGrid g = build_grid(0.0, 1.0, n);
    const auto op = make_op(KernelSpec::gaussian(0.1), g, 1.0);
    const Eigen::VectorXd m = profile(g, [](double x) { return 1.0 + 0.3 * std::cos(kTwoPi * x); });
    return ModelParams::lotka_volterra(op, op, m, m, 1.0, 1.0);
}

/// Initial data strictly inside the box 0 < u < u_d, 0 < v < v_D.
std::vector<SystemState> box_inits(const ModelParams& p, const Eigen::VectorXd& u_d, const Eigen::VectorXd& v_D) {
    const SpatialGrid& g = p.grid();
    const double amps[4][2] = {{0.2, 0.7}, {0.6, 0.3}, {0.45, 0.45}, {0.8, 0.15}};
    std::vector<SystemState> out;
    for (int k = 0; k < 4; ++k) {
        const double au = amps[k][0];
        const double av = amps[k][1];
        const Eigen::VectorXd fu = profile(g, [&](double x) { return au * (1.0 + 0.2 * std::sin(kTwoPi * (k + 1) * x)); });
        const Eigen::VectorXd fv = profile(g, [&](double x) { return av * (1.0 + 0.2 * std::cos(kTwoPi * (k + 2) * x)); });
        out.push_back({u_d.cwiseProduct(fu), v_D.cwiseProduct(fv), 0.0});
    }
    return out;
}

/// Smooth initial data defined by profiles, comparable across grid sizes.
std::vector<SystemState> smooth_inits(const SpatialGrid& g) {
    std::vector<SystemState> out;
    const double shapes[3][2] = {{0.3, 0.5}, {0.7, 0.2}, {0.15, 0.9}};
    for (const auto& s : shapes) {
        out.push_back({profile(g, [&](double x) { return s[0] * (1.0 + 0.3 * std::cos(kTwoPi * x)); }),
                       profile(g, [&](double x) { return s[1] * (1.0 + 0.3 * std::sin(kTwoPi * x)); }), 0.0});
    }
    return out;
}

/// Fine-grid field averaged onto the grid with half the nodes (midpoint grids nest).
Eigen::VectorXd coarsen(const Eigen::VectorXd& fine) {
    Eigen::VectorXd out(fine.size() / 2);
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        out[i] = 0.5 * (fine[2 * i] + fine[2 * i + 1]);
    }
    return out;
}

// 1. Operator invariants
void operator_invariants(Checker& c) {
    const SpatialGrid g = build_grid(0.0, 1.0, 200);
    const std::vector<KernelSpec> kernels = {KernelSpec::gaussian(0.1), KernelSpec::tophat(0.15),
                                             KernelSpec::cosine_bump(0.2)};
    const std::vector<BoundaryRegime> regimes = {BoundaryRegime::no_flux(), BoundaryRegime::periodic(1.0),
                                                 BoundaryRegime::hostile()};
    Rng rng(101);
    double asym = 0.0;
    double mass = 0.0;
    double quad = -std::numeric_limits<double>::infinity();
    double oracle_gap = 0.0;
    for (const KernelSpec& k : kernels) {
        for (const BoundaryRegime& r : regimes) {
            const auto op = make_op(k, g, 1.0, 1.0, r);
            asym = std::max(asym, op->max_abs_asymmetry());
            const bool conservative = r.tag != BoundaryRegime::Tag::Hostile;
            for (int t = 0; t < 100; ++t) {
                Eigen::VectorXd phi(200);
                for (Eigen::Index i = 0; i < phi.size(); ++i) {
                    phi[i] = rng.uniform(-1.0, 1.0);
                }
                const Eigen::VectorXd k_phi = op->apply(phi);
                if (conservative) {
                    mass = std::max(mass, std::abs(g.weight() * k_phi.sum()) / (200.0 * sup(phi)));
                }
                quad = std::max(quad, op->quadratic_form(phi));
                if (t == 0) {
                    oracle_gap = std::max(oracle_gap, sup(k_phi - oracle::brute_force_dispersal(k, g, r, phi)));
                }
            }
        }
    }
    c.le(asym, 0.0);
    c.le(mass, 1e-12);
    c.le(quad, 1e-12);
    c.le(oracle_gap, 1e-12);
    c.note("asym=" + sci(asym) + " mass/(n|phi|)=" + sci(mass) + " max_quad=" + sci(quad) +
           " brute_force_gap=" + sci(oracle_gap));
}

// 2. ODE-limit attractors
void ode_limits(Checker& c) {
    struct Case {
        const char* label;
        double b, c, u, v;
    };
    const Case cases[] = {{"a", 0.5, 0.5, 2.0 / 3.0, 2.0 / 3.0}, {"b", 0.25, 2.0, 0.0, 1.0}, {"c", 2.0, 0.25, 1.0, 0.0}};
    for (const Case& k : cases) {
        const ModelParams p = constant_model(200, k.b, k.c);
        const auto inits = random_initial_states(p, 8, 2024);
        int hits = 0;
        double worst = 0.0;
        SimulationControls controls;
        controls.horizon = 200.0;
        for (const SystemState& init : inits) {
            const SimulationOutcome o = simulate(p, init, controls);
            const double err = std::max(sup(o.final.u.array() - k.u), sup(o.final.v.array() - k.v));
            worst = std::max(worst, err);
            hits += c.le(err, 1e-6) ? 1 : 0;
        }
        c.note(std::string(k.label) + ":" + std::to_string(hits) + "/8 err=" + sci(worst));
    }
}

// 3. Single-species dichotomy
void single_species_dichotomy(Checker& c) {
    const SpatialGrid g = build_grid(0.0, 1.0, 200);
    const auto op = make_op(KernelSpec::gaussian(0.1), g, 1.0);
    int agree = 0;
    for (double m0 : {-0.5, -0.1, 0.1, 0.5, 1.0}) {
        const SingleSpeciesProblem problem = SingleSpeciesProblem::logistic(op, Eigen::VectorXd::Constant(200, m0));
        const SteadyStateResult r = solve_steady_state(problem);
        const bool ok = r.exists == (m0 > 0.0) && (!r.exists || c.le(sup(r.state->array() - m0), 1e-8));
        agree += ok ? 1 : 0;
        c.require(ok, "m0=" + sci(m0) + " wrong");
    }
    const SingleSpeciesProblem het = SingleSpeciesProblem::logistic(
        op, profile(g, [](double x) { return 1.0 + 0.5 * std::cos(kTwoPi * x); }));
    const SteadyStateResult r = solve_steady_state(het);
    c.require(r.exists, "heterogeneous steady state missing");
    c.le(r.uniqueness_gap, 1e-8);
    c.le(r.residual, 1e-8);
    c.note("constant sweep " + std::to_string(agree) + "/5; gap=" + sci(r.uniqueness_gap) + " residual=" +
           sci(r.residual) + " lambda*=" + sci(r.lambda_star));
}

// 4. Spectral cross-validation
void spectral_cross_validation(Checker& c) {
    Rng rng(404);
    double worst_power = 0.0;
    double worst_rayleigh = 0.0;
    int largest = 0;
    for (int t = 0; t < 20; ++t) {
        const auto n = static_cast<std::size_t>(50 + rng.next() % 351);
        largest = std::max(largest, static_cast<int>(n));
        const SpatialGrid g = build_grid(0.0, 1.0, n);
        const double scale = rng.uniform(0.05, 0.3);
        const KernelSpec k = t % 3 == 0 ? KernelSpec::gaussian(scale)
                             : t % 3 == 1 ? KernelSpec::tophat(scale)
                                          : KernelSpec::cosine_bump(scale);
        const BoundaryRegime r = t % 2 == 0 ? BoundaryRegime::no_flux()
                                 : t % 4 == 1 ? BoundaryRegime::periodic(1.0)
                                              : BoundaryRegime::hostile();
        const auto op = make_op(k, g, rng.uniform(0.2, 2.0), 1.0, r);
        const double a1 = rng.uniform(0.2, 1.0);
        const double a2 = rng.uniform(0.0, 0.5);
        const double phase = rng.uniform(0.0, kTwoPi);
        const Eigen::VectorXd q = profile(g, [&](double x) {
            return a1 * std::cos(kTwoPi * x + phase) + a2 * std::sin(2.0 * kTwoPi * x);
        });
        const double dense = spectral_bound(*op, q, SpectralMethod::Dense).bound;
        const double power = spectral_bound(*op, q, SpectralMethod::Power).bound;
        const double rayleigh = spectral_bound(*op, q, SpectralMethod::Rayleigh).bound;
        worst_power = std::max(worst_power, std::abs(dense - power));
        worst_rayleigh = std::max(worst_rayleigh, std::abs(dense - rayleigh));
    }
    c.le(worst_power, 1e-8);
    c.le(worst_rayleigh, 1e-8);

    double worst_small = 0.0;
    for (int n = 3; n <= 8; ++n) {
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) {
                a(i, j) = a(j, i) = rng.uniform(-1.0, 1.0);
            }
        }
        const std::vector<double> eig = oracle::jacobi_eigenvalues(a);
        worst_small = std::max(worst_small, std::abs(eig.back() - spectral_bound(a).bound));
        const SpatialGrid g = build_grid(0.0, 1.0, static_cast<std::size_t>(n));
        const auto op = make_op(KernelSpec::tophat(0.4), g, 1.0);
        const Eigen::VectorXd q = profile(g, [](double x) { return std::sin(3.0 * x); });
        const double brute = oracle::jacobi_eigenvalues(operator_matrix(*op, q)).back();
        worst_small = std::max(worst_small, std::abs(brute - spectral_bound(*op, q).bound));
    }
    c.le(worst_small, 1e-10);
    c.note("20 instances n<=" + std::to_string(largest) + " |dense-power|=" + sci(worst_power) +
           " |dense-rayleigh|=" + sci(worst_rayleigh) + " small-n brute force=" + sci(worst_small));
}

// 5. Classification partition
void classification_partition(Checker& c) {
    const ModelParams base = constant_model(200, 0.5, 0.5);
    const SemiTrivialStates semi = solve_semi_trivial(base);
    int cells = 0;
    int degenerate = 0;
    int probes_ok = 0;
    double worst_mu = 0.0;
    bool corner_fired = false;
    for (int i = 1; i <= 7; ++i) {
        for (int j = 1; j <= 7; ++j) {
            const double b = i / 7.0;
            const double cc = j / 7.0;
            ModelParams p = base;
            p.b.setConstant(b);
            p.c.setConstant(cc);
            const ClassificationOutcome o = classify(p, semi);
            const ClassificationEvidence& e = o.evidence;
            const double eps = e.neutral_band;
            const int members = (e.mu > eps && e.nu > eps) + (e.mu > eps && e.nu <= eps) +
                                (e.mu <= eps && e.nu > eps) + (std::abs(e.mu) <= eps && std::abs(e.nu) <= eps);
            c.require(members == 1, "cell b=" + sci(b) + " c=" + sci(cc) + " has " + std::to_string(members) +
                                        " alternatives");
            c.require(o.status != ClassStatus::InconsistentDegenerate, "inconsistent cell");
            worst_mu = std::max({worst_mu, std::abs(e.mu - (1.0 - b)), std::abs(e.nu - (1.0 - cc))});
            if (o.kind == CaseKind::Degenerate) {
                ++degenerate;
                c.le(std::abs(e.competition_product - 1.0), 1e-8);
                c.le(e.state_gap, 1e-6);
                corner_fired = corner_fired || (i == 7 && j == 7);
            }
            const NonexistenceReport probe = nonexistence_probe(p, o.u_d, o.v_D, o.exponents);
            probes_ok += probe.consistent ? 1 : 0;
            ++cells;
        }
    }
    c.le(worst_mu, 1e-10);
    c.require(corner_fired && degenerate == 1, "degenerate must fire exactly at b = c = 1");
    c.require(probes_ok == cells, "integral certificate implication failed");
    c.note(std::to_string(cells) + " cells, degenerate=" + std::to_string(degenerate) + ", probes " +
           std::to_string(probes_ok) + "/" + std::to_string(cells) + ", |mu-(1-b)|,|nu-(1-c)|<=" + sci(worst_mu));
}

struct ContinuumRunSummary {
    int on_line = 0;
    double worst_distance = 0.0;
    double spread = 0.0;
    double worst_energy = 0.0;
    double worst_monotone = 0.0;
    int trapped = 0;
    std::vector<double> s;
};

ContinuumRunSummary continuum_runs(Checker& c, const ModelParams& p, const ClassificationOutcome& o,
                                   const std::vector<SystemState>& inits, std::size_t monotone_count,
                                   double threshold) {
    ContinuumRunSummary sum;
    SimulationControls controls;
    controls.horizon = 2000.0;
    controls.record_states = true;
    controls.classify_threshold = threshold;
    controls.attractors = attractors_for(o);
    for (std::size_t k = 0; k < inits.size(); ++k) {
        const SimulationOutcome out = simulate(p, inits[k], controls);
        const bool on = out.limit_type == LimitType::ContinuumPoint && c.le(out.attractor_distance, threshold);
        sum.on_line += on ? 1 : 0;
        sum.worst_distance = std::max(sum.worst_distance, out.attractor_distance);
        if (out.s_estimate) {
            sum.s.push_back(*out.s_estimate);
        }
        const EnergyDiagnostics e = energy_residual(out.final, p, o.u_d, o.v_D, 0.3);
        c.require(e.s_independent, "energy depends on s");
        sum.worst_energy = std::max(sum.worst_energy, e.energy);
        if (k < monotone_count) {
            for (std::size_t t = 1; t < out.series.size(); ++t) {
                sum.worst_monotone = std::max({sum.worst_monotone, out.series[t - 1].theta - out.series[t].theta,
                                               out.series[t].eta - out.series[t - 1].eta});
            }
        }
        // order trap: last sample violating u < u_d or v < v_D must precede the end
        std::size_t last_bad = 0;
        bool any_bad = false;
        for (std::size_t t = 0; t < out.snapshots.size(); ++t) {
            const SystemState& s = out.snapshots[t];
            if ((s.u.array() >= o.u_d.array()).any() || (s.v.array() >= o.v_D.array()).any()) {
                last_bad = t;
                any_bad = true;
            }
        }
        sum.trapped += (!any_bad || last_bad + 1 < out.snapshots.size()) ? 1 : 0;
    }
    if (!sum.s.empty()) {
        const auto [lo, hi] = std::minmax_element(sum.s.begin(), sum.s.end());
        sum.spread = *hi - *lo;
    }
    return sum;
}

// 6. Degenerate continuum
void degenerate_continuum(Checker& c) {
    const ModelParams p = degenerate_model(200);
    const ClassificationOutcome o = classify(p);
    c.require(o.kind == CaseKind::Degenerate && o.prediction == Prediction::Continuum, "not classified degenerate");

    std::vector<double> samples;
    for (int k = 0; k <= 10; ++k) {
        samples.push_back(k / 10.0);
    }
    const ContinuumTable table = continuum_check(p, o.u_d, o.v_D, samples);
    double worst = 0.0;
    for (const ContinuumRow& row : table.rows) {
        worst = std::max({worst, row.residual_u, row.residual_v});
    }
    c.le(worst, 1e-8);

    std::vector<SystemState> inits = box_inits(p, o.u_d, o.v_D);
    for (SystemState& s : random_initial_states(p, 4, 66)) {
        inits.push_back(std::move(s));
    }
    const ContinuumRunSummary sum = continuum_runs(c, p, o, inits, 4, 1e-4);
    c.require(sum.on_line == 8, "runs off the continuum");
    c.ge(sum.spread, 0.05);
    c.le(sum.worst_energy, 1e-8);
    c.le(sum.worst_monotone, 1e-10);
    c.require(sum.trapped == 8, "order trap not reached");
    c.note("residual=" + sci(worst) + " on_line=" + std::to_string(sum.on_line) + "/8 dist<=" +
           sci(sum.worst_distance) + " s_spread=" + sci(sum.spread) + " E<=" + sci(sum.worst_energy) +
           " theta/eta_violation=" + sci(sum.worst_monotone) + " trapped=" + std::to_string(sum.trapped) + "/8");
}

// 7. Coexistence certification
void coexistence_certification(Checker& c) {
    const SpatialGrid g = build_grid(0.0, 1.0, 200);
    const KernelSpec k = KernelSpec::gaussian(0.1);
    const ModelParams p = ModelParams::lotka_volterra(
        make_op(k, g, 0.5), make_op(k, g, 0.5), profile(g, [](double x) { return 1.0 + 0.5 * std::cos(kTwoPi * x); }),
        profile(g, [](double x) { return 1.0 + 0.3 * std::sin(kTwoPi * x); }), 0.4, 0.4);
    const ClassificationOutcome o = classify(p);
    c.require(o.kind == CaseKind::BothUnstable, "not both_unstable");
    const VerificationReport v = verify_prediction(p, o);
    c.require(v.bracket.has_value(), "bracket failed: " + v.bracket_error);
    if (!v.bracket) {
        return;
    }
    const BracketReport& b = *v.bracket;
    c.le(b.distance, 1e-6);
    const Eigen::VectorXd cu = 0.5 * (b.upper_limit.u + b.lower_limit.u);
    const Eigen::VectorXd cv = 0.5 * (b.upper_limit.v + b.lower_limit.v);
    double worst = 0.0;
    for (const VerificationRun& run : v.runs) {
        worst = std::max({worst, sup(run.outcome.final.u - cu), sup(run.outcome.final.v - cv)});
    }
    c.le(worst, 1e-5);
    c.require(v.total == 8, "expected 8 runs");
    c.note("bracket_distance=" + sci(b.distance) + " monotonicity_violation=" + sci(b.max_monotonicity_violation) +
           " runs=" + std::to_string(v.matches) + "/" + std::to_string(v.total) + " max_dist=" + sci(worst));
}

// 8. Symmetrization identity
void symmetrization_identity(Checker& c) {
    const SpatialGrid g = build_grid(0.0, 1.0, 200);
    const auto noflux = make_op(KernelSpec::gaussian(0.1), g, 1.0);
    const auto periodic = make_op(KernelSpec::cosine_bump(0.2), g, 1.0, 1.0, BoundaryRegime::periodic(1.0));
    Rng rng(808);
    double worst_rel = 0.0;
    double worst_oracle = 0.0;
    double worst_sign = -std::numeric_limits<double>::infinity();
    int ordered = 0;
    for (int t = 0; t < 50; ++t) {
        const DispersalOperator& op = t % 2 == 0 ? *noflux : *periodic;
        Eigen::VectorXd us(200);
        Eigen::VectorXd u(200);
        const bool make_ordered = t < 25;
        for (Eigen::Index i = 0; i < 200; ++i) {
            us[i] = rng.uniform(0.2, 1.5);
            u[i] = make_ordered ? us[i] * (1.0 + rng.uniform(0.01, 1.0)) : rng.uniform(0.2, 1.5);
        }
        const SymmetrizationGap gap = symmetrization_gap(op, u, us);
        const double scale = std::max({std::abs(gap.lhs), std::abs(gap.rhs), 1e-300});
        worst_rel = std::max(worst_rel, std::abs(gap.lhs - gap.rhs) / scale);
        worst_oracle = std::max(worst_oracle, std::abs(oracle::exchange_rhs(op, u, us) - gap.rhs) / scale);
        if (gap.ordered) {
            ++ordered;
            worst_sign = std::max({worst_sign, gap.lhs, gap.rhs});
        }
    }
    c.le(worst_rel, 1e-10);
    c.le(worst_oracle, 1e-10);
    c.le(worst_sign, 0.0);
    c.require(ordered == 25, "ordered pair count");
    c.note("50 pairs rel|lhs-rhs|=" + sci(worst_rel) + " oracle=" + sci(worst_oracle) + " max_sign(ordered " +
           std::to_string(ordered) + ")=" + sci(worst_sign));
}

// 9. Mixed-model consistency
void mixed_consistency(Checker& c) {
    const std::size_t n = 200;
    const SpatialGrid g = build_grid(0.0, 1.0, n);
    const KernelSpec k = KernelSpec::gaussian(0.1);

    // alpha = beta = 1 against the pure nonlocal path
    const Eigen::VectorXd m = profile(g, [](double x) { return 1.0 + 0.5 * std::cos(kTwoPi * x); });
    const Eigen::VectorXd M = profile(g, [](double x) { return 1.0 + 0.3 * std::sin(kTwoPi * x); });
    const auto pure_u = std::make_shared<const DispersalOperator>(assemble_dispersal(k, g, BoundaryRegime::no_flux(), 0.5));
    const ModelParams pure = ModelParams::lotka_volterra(pure_u, pure_u, m, M, 0.4, 0.4);
    const ModelParams mixed_one =
        ModelParams::lotka_volterra(make_op(k, g, 0.5, 1.0), make_op(k, g, 0.5, 1.0), m, M, 0.4, 0.4);
    SimulationControls controls;
    controls.horizon = 50.0;
    controls.stop_on_convergence = false;
    const SystemState init = random_initial_states(pure, 1, 9).front();
    const SimulationOutcome a = simulate(pure, init, controls);
    const SimulationOutcome b = simulate(mixed_one, init, controls);
    const bool identical_run =
        std::memcmp(a.final.u.data(), b.final.u.data(), n * sizeof(double)) == 0 &&
        std::memcmp(a.final.v.data(), b.final.v.data(), n * sizeof(double)) == 0;
    const ClassificationOutcome ca = classify(pure);
    const ClassificationOutcome cb = classify(mixed_one);
    const bool identical_class = ca.exponents.mu == cb.exponents.mu && ca.exponents.nu == cb.exponents.nu &&
                                 ca.kind == cb.kind && ca.prediction == cb.prediction;
    c.require(identical_run && identical_class, "alpha = beta = 1 differs from the pure path");

    // alpha = beta = 0.5, criterion 2(a)
    const ModelParams half = constant_model(n, 0.5, 0.5, 0.5, 0.5);
    const ClassificationOutcome ch = classify(half);
    c.require(ch.kind == CaseKind::BothUnstable, "mixed constant case not both_unstable");
    double worst_const = 0.0;
    SimulationControls to200;
    to200.horizon = 200.0;
    for (const SystemState& s : random_initial_states(half, 8, 2024)) {
        const SimulationOutcome o = simulate(half, s, to200);
        worst_const = std::max({worst_const, sup(o.final.u.array() - 2.0 / 3.0), sup(o.final.v.array() - 2.0 / 3.0)});
    }
    c.le(worst_const, 1e-5);

    // alpha = 1, beta = 0.5 degenerate: M chosen so that b u_d = c1 v_D
    const auto op_u = make_op(k, g, 1.0, 1.0);
    const auto op_v = make_op(k, g, 1.0, 0.5);
    const Eigen::VectorXd mu_growth = profile(g, [](double x) { return 1.0 + 0.3 * std::cos(kTwoPi * x); });
    const SteadyStateResult ud = solve_steady_state(SingleSpeciesProblem::logistic(op_u, mu_growth));
    c.require(ud.exists, "u_d missing");
    const Eigen::VectorXd v_hat = *ud.state;
    const Eigen::VectorXd M_deg = v_hat - (op_v->apply(v_hat).array() / v_hat.array()).matrix();
    const ModelParams deg = ModelParams::lotka_volterra(op_u, op_v, mu_growth, M_deg, 1.0, 1.0);
    const ClassificationOutcome cd = classify(deg);
    c.require(cd.kind == CaseKind::Degenerate && cd.prediction == Prediction::Continuum,
              "mixed degenerate case not classified degenerate");
    std::vector<SystemState> inits = box_inits(deg, cd.u_d, cd.v_D);
    const ContinuumRunSummary sum = continuum_runs(c, deg, cd, inits, inits.size(), 1e-5);
    c.require(sum.on_line == static_cast<int>(inits.size()), "mixed runs off the continuum");
    c.ge(sum.spread, 0.05);
    c.le(sum.worst_monotone, 1e-10);

    // Laplacian part: exact zero row sums
    const auto& lap = *op_v->local_part();
    double worst_row = 0.0;
    for (Eigen::Index i = 0; i < lap.outerSize(); ++i) {
        double row = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(lap, i); it; ++it) {
            row += it.value();
        }
        worst_row = std::max(worst_row, std::abs(row));
    }
    const Eigen::VectorXd col = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)).transpose() * lap;
    c.le(worst_row, 0.0);
    c.le(sup(col), 0.0);

    c.note(std::string("pure_vs_mix1=") + (identical_run && identical_class ? "bit-identical" : "DIFFERENT") +
           " mix0.5_const_err=" + sci(worst_const) + " mixed_degenerate on_line=" + std::to_string(sum.on_line) + "/" +
           std::to_string(inits.size()) + " dist<=" + sci(sum.worst_distance) + " s_spread=" + sci(sum.spread) +
           " laplacian_row_sum=" + sci(worst_row));
}

// 10. Spreading
void spreading(Checker& c) {
    const SpatialGrid g = build_grid(0.0, 1.0, 200);
    double worst_min = std::numeric_limits<double>::infinity();
    for (const KernelSpec& k : {KernelSpec::gaussian(0.1), KernelSpec::tophat(0.1), KernelSpec::cosine_bump(0.1)}) {
        const SingleSpeciesProblem problem =
            SingleSpeciesProblem::logistic(make_op(k, g, 1.0), Eigen::VectorXd::Ones(200));
        Eigen::VectorXd u0 = Eigen::VectorXd::Zero(200);
        u0.segment(90, 20).setConstant(0.5);
        MarchOptions options;
        options.stop_on_convergence = false;
        const SingleTrajectory t = time_march_single(problem, u0, 1.0, options);
        worst_min = std::min(worst_min, t.final.minCoeff());
        c.require(std::abs(t.t_final - 1.0) < 1e-12, "did not reach t = 1");
    }
    c.gt(worst_min, 0.0);
    c.note("support 20/200 nodes, min u(.,1)=" + sci(worst_min));
}

// 11. Grid robustness
void grid_robustness(Checker& c) {
    double const_change = 0.0;
    {
        std::vector<Eigen::VectorXd> finals[2];
        for (int level = 0; level < 2; ++level) {
            const ModelParams p = constant_model(level == 0 ? 200 : 400, 0.5, 0.5);
            SimulationControls controls;
            controls.horizon = 200.0;
            for (const SystemState& s : smooth_inits(p.grid())) {
                const SimulationOutcome o = simulate(p, s, controls);
                const Eigen::VectorXd u = level == 0 ? o.final.u : coarsen(o.final.u);
                const Eigen::VectorXd v = level == 0 ? o.final.v : coarsen(o.final.v);
                Eigen::VectorXd both(u.size() + v.size());
                both << u, v;
                finals[level].push_back(both);
            }
        }
        for (std::size_t k = 0; k < finals[0].size(); ++k) {
            const_change = std::max(const_change, sup(finals[0][k] - finals[1][k]));
        }
    }
    double s_change = 0.0;
    std::vector<double> s_values[2];
    for (int level = 0; level < 2; ++level) {
        const ModelParams p = degenerate_model(level == 0 ? 200 : 400);
        const ClassificationOutcome o = classify(p);
        SimulationControls controls;
        controls.horizon = 2000.0;
        controls.attractors = attractors_for(o);
        for (const SystemState& s : smooth_inits(p.grid())) {
            const SimulationOutcome out = simulate(p, s, controls);
            s_values[level].push_back(out.s_estimate.value_or(std::nan("")));
        }
    }
    for (std::size_t k = 0; k < s_values[0].size(); ++k) {
        const double d = std::abs(s_values[0][k] - s_values[1][k]);
        s_change = std::isnan(d) ? std::numeric_limits<double>::infinity() : std::max(s_change, d);
    }
    c.le(const_change, 1e-3);
    c.le(s_change, 1e-3);
    c.note("coexistence state change=" + sci(const_change) + " s_estimate change=" + sci(s_change));
}

struct Entry {
    int id;
    const char* name;
    void (*run)(Checker&);
};

const Entry kEntries[] = {
    {1, "operator invariants", operator_invariants},
    {2, "ODE-limit attractors", ode_limits},
    {3, "single-species dichotomy", single_species_dichotomy},
    {4, "spectral cross-validation", spectral_cross_validation},
    {5, "classification partition", classification_partition},
    {6, "degenerate continuum", degenerate_continuum},
    {7, "coexistence certification", coexistence_certification},
    {8, "symmetrization identity", symmetrization_identity},
    {9, "mixed-model consistency", mixed_consistency},
    {10, "spreading property", spreading},
    {11, "grid robustness", grid_robustness},
};

}  // namespace

std::vector<Criterion> run_suite(const SuiteOptions& options, std::ostream& out) {
    std::vector<Criterion> results;
    for (const Entry& e : kEntries) {
        if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), e.id) == options.only.end()) {
            continue;
        }
        Criterion result;
        result.id = e.id;
        result.name = e.name;
        Checker checker(options.broken == e.id);
        const auto start = std::chrono::steady_clock::now();
        try {
            e.run(checker);
            result.pass = checker.ok();
            result.detail = checker.detail();
        } catch (const std::exception& ex) {
            result.pass = false;
            result.detail = checker.detail() + " exception: " + ex.what();
        }
        result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        out << (result.pass ? "PASS" : "FAIL") << " [" << (result.id < 10 ? " " : "") << result.id << "] "
            << result.name << ": " << result.detail;
        if (options.timing) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " (%.1fs)", result.seconds);
            out << buf;
        }
        out << '\n' << std::flush;
        results.push_back(std::move(result));
    }
    return results;
}

}  // namespace nlcomp::acceptance
