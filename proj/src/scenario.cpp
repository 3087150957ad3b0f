#include "nlcomp/scenario.hpp"

#include "nlcomp/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace nlcomp {

namespace {

std::string exact(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string brief(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

double sup(const Eigen::VectorXd& x) { return x.cwiseAbs().maxCoeff(); }

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::Config, "cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw Error(ErrorKind::Config, "failed writing '" + path.string() + "'");
    }
}

void prepare_dir(const RunContext& ctx) {
    std::error_code ec;
    std::filesystem::create_directories(ctx.out_dir, ec);
    if (ec || !std::filesystem::is_directory(ctx.out_dir)) {
        throw Error(ErrorKind::Config, "cannot create output directory '" + ctx.out_dir.string() + "'");
    }
}

std::string csv_name(const ScenarioConfig& config, std::size_t k) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "_%03zu.csv", k);
    return config.csv_prefix + buf;
}

void describe_setup(std::ostream& out, const ScenarioConfig& cfg) {
    out << "config: " << cfg.source << '\n';
    out << "grid: [" << brief(cfg.lo) << ", " << brief(cfg.hi) << "], n = " << cfg.n << '\n';
    out << "kernel u: " << cfg.kernel_u.spec().describe() << '\n';
    out << "kernel v: " << cfg.kernel_v.spec().describe() << '\n';
    out << "regime: " << cfg.regime.describe() << '\n';
    out << "d = " << brief(cfg.d) << ", D = " << brief(cfg.D) << ", alpha = " << brief(cfg.alpha)
        << ", beta = " << brief(cfg.beta) << '\n';
    for (const char* name : {"m", "M", "b", "c", "b1", "c1"}) {
        out << "  " << name << " = " << cfg.coefficients.at(name).describe() << '\n';
    }
    out << "rng: " << cfg.rng_algorithm << ", seed = " << cfg.seed << '\n';
}

void describe_steady(std::ostream& out, const char* name, const SteadyStateResult& r) {
    out << "  " << name << ": lambda* = " << brief(r.lambda_star);
    if (r.exists) {
        out << ", exists, max = " << brief(r.state->maxCoeff()) << ", min = " << brief(r.state->minCoeff())
            << ", residual = " << brief(r.residual) << ", uniqueness gap = " << brief(r.uniqueness_gap) << '\n';
    } else if (r.degenerate) {
        out << ", inside the neutral band, no positive steady state\n";
    } else {
        out << ", does not exist (trivial state is globally stable)\n";
    }
}

AttractorSet exploration_attractors(const ModelParams& params, const SemiTrivialStates& semi) {
    AttractorSet set;
    if (semi.u.exists) {
        set.u_d = *semi.u.state;
    }
    if (semi.v.exists) {
        set.v_D = *semi.v.state;
    }
    if (set.u_d && set.v_D) {
        const double gap = sup(params.b.cwiseProduct(*set.u_d) - params.c1.cwiseProduct(*set.v_D));
        set.continuum = std::abs(params.competition_product() - params.self_product()) <= 1e-8 &&
                        gap <= 1e-6 * sup(params.c1.cwiseProduct(*set.v_D));
    }
    return set;
}

std::string quote(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) {
        return text;
    }
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') {
            out += '"';
        }
        out += ch == '\n' ? ' ' : ch;
    }
    return out + '"';
}

std::string sweep_line(std::size_t index, const SweepRow& row) {
    std::ostringstream line;
    line << index;
    for (double v : row.values) {
        line << ',' << exact(v);
    }
    line << ',' << exact(row.mu) << ',' << exact(row.nu) << ',' << row.kind << ',' << row.prediction << ','
         << row.status << ',' << exact(row.match_rate) << ',' << quote(row.error);
    return line.str();
}

}  // namespace

std::string timeseries_csv(const std::vector<TimeSeriesRow>& rows, int every) {
    std::ostringstream out;
    out << kTimeseriesHeader << '\n';
    out << "t,theta,eta,energy_E,l2_u,l2_v,sup_dist_to_attractor\n";
    const std::size_t step = static_cast<std::size_t>(std::max(every, 1));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (k % step != 0 && k + 1 != rows.size()) {
            continue;
        }
        const TimeSeriesRow& r = rows[k];
        out << exact(r.t) << ',' << exact(r.theta) << ',' << exact(r.eta) << ',' << exact(r.energy) << ','
            << exact(r.l2_u) << ',' << exact(r.l2_v) << ',' << exact(r.sup_dist) << '\n';
    }
    return out.str();
}

std::string run_steady(const ScenarioConfig& config, const RunContext& ctx) {
    prepare_dir(ctx);
    const ModelParams params = build_model(config);
    const SemiTrivialStates semi = solve_semi_trivial(params);

    std::ostringstream report;
    report << "nlcomp steady report\n";
    describe_setup(report, config);
    report << "\nsemi-trivial states\n";
    describe_steady(report, "u_d", semi.u);
    describe_steady(report, "v_D", semi.v);

    std::ostringstream csv;
    csv << "# nlcomp-steady v1\nx,u_d,v_D\n";
    const double nan = std::nan("");
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        csv << exact(params.grid().node(i)) << ',' << exact(semi.u.exists ? (*semi.u.state)[k] : nan) << ','
            << exact(semi.v.exists ? (*semi.v.state)[k] : nan) << '\n';
    }
    write_file(ctx.out_dir / (config.csv_prefix + "_steady.csv"), csv.str());
    report << "\nfiles: " << config.csv_prefix << "_steady.csv\n";
    write_file(ctx.out_dir / config.report, report.str());
    return report.str();
}

std::string run_stability(const ScenarioConfig& config, const RunContext& ctx) {
    prepare_dir(ctx);
    const ModelParams params = build_model(config);
    const SemiTrivialStates semi = solve_semi_trivial(params);

    std::ostringstream report;
    report << "nlcomp stability report\n";
    describe_setup(report, config);
    report << "\nsemi-trivial states\n";
    describe_steady(report, "u_d", semi.u);
    describe_steady(report, "v_D", semi.v);
    if (!semi.u.exists || !semi.v.exists) {
        write_file(ctx.out_dir / config.report, report.str());
        throw Error(ErrorKind::Hypothesis, std::string("semi-trivial state ") + (semi.u.exists ? "v_D" : "u_d") +
                                               " does not exist (lambda* = " +
                                               brief(semi.u.exists ? semi.v.lambda_star : semi.u.lambda_star) +
                                               " <= 0)");
    }
    const StabilityExponents e = stability_exponents(params, *semi.u.state, *semi.v.state);
    report << "\nstability exponents\n";
    report << "  mu = " << brief(e.mu) << "  (u_d, 0) " << (e.mu > e.neutral_band    ? "unstable"
                                                            : e.mu < -e.neutral_band ? "stable"
                                                                                     : "neutral")
           << '\n';
    report << "  nu = " << brief(e.nu) << "  (0, v_D) " << (e.nu > e.neutral_band    ? "unstable"
                                                            : e.nu < -e.neutral_band ? "stable"
                                                                                     : "neutral")
           << '\n';
    report << "  neutral band = " << brief(e.neutral_band) << '\n';
    write_file(ctx.out_dir / config.report, report.str());
    return report.str();
}

std::string run_simulate(const ScenarioConfig& config, const RunContext& ctx) {
    prepare_dir(ctx);
    const ModelParams params = build_model(config);
    const SystemState init = build_initial_state(config, params);
    const SemiTrivialStates semi = solve_semi_trivial(params);

    SimulationControls controls;
    controls.horizon = config.horizon;
    controls.convergence_tolerance = config.tolerance;
    controls.classify_threshold = config.threshold;
    controls.attractors = exploration_attractors(params, semi);
    const SimulationOutcome out = simulate(params, init, controls);

    const std::string name = csv_name(config, 0);
    write_file(ctx.out_dir / name, timeseries_csv(out.series, config.csv_every));

    std::ostringstream report;
    report << "nlcomp simulation report\n";
    describe_setup(report, config);
    report << "weak competition: " << (params.weak_competition() ? "yes" : "no (exploration mode)") << '\n';
    report << "\nsimulation\n";
    report << "  t final = " << brief(out.final.t) << ", steps = " << out.steps << ", dt = " << brief(out.dt) << '\n';
    report << "  converged = " << (out.converged ? "yes" : "no") << ", residual = " << brief(out.residual) << '\n';
    report << "  limit = " << to_string(out.limit_type) << ", distance = " << brief(out.attractor_distance) << '\n';
    if (out.s_estimate) {
        report << "  s_estimate = " << brief(*out.s_estimate) << '\n';
    }
    if (out.both_vanished) {
        report << "  anomaly: both L2 masses fell below 1e-8 (discretization artifact)\n";
    }
    if (!out.trend.empty()) {
        report << "  trend: " << out.trend << '\n';
    }
    report << "\nfiles: " << name << '\n';
    write_file(ctx.out_dir / config.report, report.str());
    return report.str();
}

std::string run_scenario(const ScenarioConfig& config, const RunContext& ctx) {
    prepare_dir(ctx);
    const ModelParams params = build_model(config);

    std::ostringstream report;
    report << "nlcomp scenario report\n";
    describe_setup(report, config);

    const SemiTrivialStates semi = solve_semi_trivial(params);
    report << "\nsemi-trivial states\n";
    describe_steady(report, "u_d", semi.u);
    describe_steady(report, "v_D", semi.v);

    ClassificationOutcome outcome;
    try {
        outcome = classify(params, semi);
    } catch (const Error&) {
        write_file(ctx.out_dir / config.report, report.str());
        throw;
    }

    const ClassificationEvidence& ev = outcome.evidence;
    report << "\nstability exponents\n";
    report << "  mu = " << brief(ev.mu) << "\n  nu = " << brief(ev.nu) << "\n  neutral band = " << brief(ev.neutral_band)
           << '\n';
    report << "\nclassification\n";
    report << "  case = " << to_string(outcome.kind) << '\n';
    report << "  prediction = " << to_string(outcome.prediction) << '\n';
    report << "  status = " << to_string(outcome.status) << '\n';
    report << "  max b * max c = " << brief(ev.competition_product) << ", min b1 * min c1 = " << brief(ev.self_product)
           << '\n';
    report << "  |b u_d - c1 v_D|_inf = " << brief(ev.state_gap) << " (scale " << brief(ev.state_scale) << ")\n";
    report << "  coefficient spread = " << brief(ev.coefficient_spread) << '\n';
    report << "  degenerate certificate = " << (ev.certificate ? "holds" : "fails") << '\n';

    if (outcome.kind == CaseKind::Degenerate) {
        std::vector<double> samples;
        for (int k = 0; k < config.s_samples; ++k) {
            samples.push_back(static_cast<double>(k) / static_cast<double>(config.s_samples - 1));
        }
        const ContinuumTable table = continuum_check(params, outcome.u_d, outcome.v_D, samples);
        double worst = 0.0;
        for (const ContinuumRow& row : table.rows) {
            worst = std::max({worst, row.residual_u, row.residual_v});
        }
        report << "\ncontinuum check\n";
        report << "  samples = " << table.rows.size() << ", max residual = " << brief(worst)
               << ", tolerance = " << brief(table.tolerance) << ", " << (table.all_pass ? "pass" : "fail") << '\n';
        if (!table.advisory.empty()) {
            report << "  advisory: " << table.advisory << '\n';
        }
    } else {
        const NonexistenceReport probe = nonexistence_probe(params, outcome.u_d, outcome.v_D, outcome.exponents);
        report << "\nintegral certificates\n";
        report << "  I1 = " << brief(probe.i1) << ", I2 = " << brief(probe.i2) << ", combined = " << brief(probe.combined)
               << ", " << (probe.consistent ? "consistent with (mu, nu)" : "INCONSISTENT with (mu, nu)") << '\n';
    }

    std::vector<std::string> files;
    if (config.verify) {
        VerifyOptions options;
        options.n_inits = config.n_inits;
        options.horizon = config.horizon;
        options.seed = config.seed;
        options.bracket_horizon = config.bracket_horizon;
        options.classify_threshold = config.threshold;
        const VerificationReport v = verify_prediction(params, outcome, options);
        report << "\nverification\n";
        report << "  matches = " << v.matches << '/' << v.total << '\n';
        report << "  max residual = " << brief(v.max_residual) << '\n';
        if (v.bracket) {
            report << "  bracket distance = " << brief(v.bracket->distance)
                   << (v.bracket->certified ? " (certified)" : " (not certified)") << '\n';
        }
        if (!v.s_estimates.empty()) {
            report << "  s_estimates =";
            for (double s : v.s_estimates) {
                report << ' ' << brief(s);
            }
            report << "\n  s spread = " << brief(v.s_spread) << '\n';
        }
        for (std::size_t k = 0; k < v.runs.size(); ++k) {
            const SimulationOutcome& o = v.runs[k].outcome;
            if (o.both_vanished) {
                report << "  anomaly: run " << k << " had both L2 masses below 1e-8\n";
            }
            const std::string name = csv_name(config, k);
            write_file(ctx.out_dir / name, timeseries_csv(o.series, config.csv_every));
            files.push_back(name);
        }
        for (const std::string& note : v.notes) {
            report << "  note: " << note << '\n';
        }
    } else {
        report << "\nverification disabled\n";
    }
    if (!files.empty()) {
        report << "\nfiles:";
        for (const std::string& f : files) {
            report << ' ' << f;
        }
        report << '\n';
    }
    write_file(ctx.out_dir / config.report, report.str());
    return report.str();
}

std::string sweep_csv(const ScenarioConfig& config, const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << kSweepHeader << '\n' << "index";
    for (const SweepAxis& axis : config.sweep) {
        out << ',' << axis.name;
    }
    out << ",mu,nu,case,prediction,status,match_rate,error\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out << sweep_line(k, rows[k]) << '\n';
    }
    return out.str();
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& config, const RunContext& ctx, const std::string& file_name) {
    if (config.sweep.empty()) {
        throw Error(ErrorKind::Config, config.source + ": sweep needs at least one sweep.<axis> key");
    }
    prepare_dir(ctx);
    const SpatialGrid grid = build_grid(config.lo, config.hi, config.n);

    std::vector<std::map<std::string, double>> combos(1);
    for (const SweepAxis& axis : config.sweep) {
        std::vector<std::map<std::string, double>> next;
        for (const auto& combo : combos) {
            for (double v : axis.values) {
                auto c = combo;
                c[axis.name] = v;
                next.push_back(std::move(c));
            }
        }
        combos = std::move(next);
    }
    if (config.sweep_weak_only) {
        auto max_of = [&](const std::map<std::string, double>& c, const std::string& name) {
            const auto it = c.find(name);
            return it != c.end() ? it->second : config.coefficients.at(name).evaluate(grid).maxCoeff();
        };
        const double self = config.coefficients.at("b1").evaluate(grid).minCoeff() *
                            config.coefficients.at("c1").evaluate(grid).minCoeff();
        std::erase_if(combos, [&](const auto& c) { return max_of(c, "b") * max_of(c, "c") > self * (1.0 + 1e-12); });
    }
    if (combos.empty()) {
        throw Error(ErrorKind::Config, config.source + ": sweep has no combinations left after filtering");
    }

    std::vector<SweepRow> rows(combos.size());
    const std::filesystem::path partial = ctx.out_dir / (file_name + ".partial");
    std::ofstream partial_out(partial, std::ios::binary | std::ios::trunc);
    if (!partial_out) {
        throw Error(ErrorKind::Config, "cannot write '" + partial.string() + "'");
    }
    std::mutex writer;

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < combos.size(); k = next++) {
            SweepRow row;
            for (const SweepAxis& axis : config.sweep) {
                row.values.push_back(combos[k].at(axis.name));
            }
            try {
                const ModelParams params = build_model(config, combos[k]);
                const ClassificationOutcome outcome = classify(params);
                row.mu = outcome.exponents.mu;
                row.nu = outcome.exponents.nu;
                row.kind = to_string(outcome.kind);
                row.prediction = to_string(outcome.prediction);
                row.status = to_string(outcome.status);
                if (config.verify) {
                    VerifyOptions options;
                    options.n_inits = config.n_inits;
                    options.horizon = config.horizon;
                    options.seed = config.seed;
                    options.bracket_horizon = config.bracket_horizon;
                    options.classify_threshold = config.threshold;
                    const VerificationReport v = verify_prediction(params, outcome, options);
                    row.match_rate = v.total > 0 ? static_cast<double>(v.matches) / v.total : 0.0;
                } else {
                    row.match_rate = std::nan("");
                }
            } catch (const Error& e) {
                row.mu = row.nu = row.match_rate = std::nan("");
                row.error = std::string(to_string(e.kind())) + ": " + e.what();
            } catch (const std::exception& e) {
                row.mu = row.nu = row.match_rate = std::nan("");
                row.error = std::string("internal: ") + e.what();
            }
            std::lock_guard<std::mutex> lock(writer);
            partial_out << sweep_line(k, row) << '\n' << std::flush;
            rows[k] = std::move(row);
        }
    };

    int threads = config.sweep_threads;
    if (threads <= 0) {
        threads = static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 8u));
    }
    threads = std::min<int>(threads, static_cast<int>(combos.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (std::thread& t : pool) {
        t.join();
    }
    partial_out.close();

    write_file(ctx.out_dir / file_name, sweep_csv(config, rows));
    std::filesystem::remove(partial);
    return rows;
}

}  // namespace nlcomp
