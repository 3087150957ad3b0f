#include "acceptance.hpp"

#include "nlcomp/config.hpp"
#include "nlcomp/error.hpp"
#include "nlcomp/scenario.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    bool quiet = false;
};

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--config", common.config, "scenario config file (key = value)")->required();
    cmd->add_option("--seed", common.seed, "override rng.seed");
    cmd->add_option("--out", common.out, "output directory");
    cmd->add_flag("--quiet", common.quiet, "do not echo the report");
}

nlcomp::ScenarioConfig load(const Common& common) {
    nlcomp::ScenarioConfig cfg = nlcomp::load_config(common.config);
    if (common.seed) {
        cfg.seed = *common.seed;
    }
    return cfg;
}

int diagnostic(nlcomp::ErrorKind kind, const std::string& message) {
    const int code = nlcomp::exit_code(kind);
    std::cerr << "nlcomp: " << nlcomp::to_string(kind) << '\n'
              << "  " << message << '\n'
              << "  exit code " << code << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlocal Lotka-Volterra competition: steady states, stability, classification"};
    app.require_subcommand(1);

    Common common;
    auto* steady = app.add_subcommand("steady", "solve the semi-trivial steady states");
    auto* stability = app.add_subcommand("stability", "stability exponents of the semi-trivial states");
    auto* simulate = app.add_subcommand("simulate", "one simulation from the configured initial data");
    auto* classify = app.add_subcommand("classify", "classify and verify the global attractor");
    auto* sweep = app.add_subcommand("sweep", "classification over ranged parameters");
    for (CLI::App* cmd : {steady, stability, simulate, classify, sweep}) {
        add_common(cmd, common);
    }

    nlcomp::acceptance::SuiteOptions suite;
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_option("--only", suite.only, "criterion ids to run")->delimiter(',');
    verify->add_option("--break", suite.broken, "test mode: make this criterion's tolerances unsatisfiable");
    verify->add_flag("--timing", suite.timing, "append wall time per criterion");
    verify->add_flag("--quiet", common.quiet, "print only the final tally");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return nlcomp::exit_code(nlcomp::ErrorKind::Config);
    }

    try {
        if (verify->parsed()) {
            std::ostringstream sink;
            const auto results = nlcomp::acceptance::run_suite(suite, common.quiet ? sink : std::cout);
            int passed = 0;
            for (const auto& r : results) {
                passed += r.pass ? 1 : 0;
            }
            std::cout << passed << '/' << results.size() << " criteria passed\n";
            return passed == static_cast<int>(results.size()) && !results.empty() ? 0 : 1;
        }

        const nlcomp::ScenarioConfig cfg = load(common);
        const nlcomp::RunContext ctx{common.out, common.quiet};
        std::string report;
        if (steady->parsed()) {
            report = nlcomp::run_steady(cfg, ctx);
        } else if (stability->parsed()) {
            report = nlcomp::run_stability(cfg, ctx);
        } else if (simulate->parsed()) {
            report = nlcomp::run_simulate(cfg, ctx);
        } else if (classify->parsed()) {
            report = nlcomp::run_scenario(cfg, ctx);
        } else if (sweep->parsed()) {
            const auto rows = nlcomp::run_sweep(cfg, ctx);
            std::map<std::string, int> tally;
            int failed = 0;
            for (const auto& row : rows) {
                if (row.error.empty()) {
                    ++tally[row.kind];
                } else {
                    ++failed;
                }
            }
            std::ostringstream text;
            text << "sweep: " << rows.size() << " rows written to sweep.csv\n";
            for (const auto& [kind, count] : tally) {
                text << "  " << kind << ": " << count << '\n';
            }
            if (failed > 0) {
                text << "  failed rows: " << failed << '\n';
            }
            report = text.str();
        }
        if (!common.quiet) {
            std::cout << report;
        }
        return 0;
    } catch (const nlcomp::Error& e) {
        return diagnostic(e.kind(), e.what());
    } catch (const std::exception& e) {
        return diagnostic(nlcomp::ErrorKind::Numerical, std::string("internal failure: ") + e.what());
    }
}
