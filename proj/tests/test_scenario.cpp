#include "nlcomp/error.hpp"
#include "nlcomp/scenario.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace nlcomp;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("nlcomp_scenario_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const char* kSmall = R"(
grid.n = 40
coef.b = 0.25
coef.c = 2
control.n_inits = 2
control.horizon = 150
)";

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("timeseries format") {
    std::vector<TimeSeriesRow> rows(3);
    rows[1].t = 1.0;
    rows[1].theta = 0.1;
    rows[2].t = 2.0;
    const std::string all = timeseries_csv(rows);
    CHECK(all.rfind(std::string(kTimeseriesHeader) + "\nt,theta,eta,energy_E,l2_u,l2_v,sup_dist_to_attractor\n", 0) == 0);
    CHECK(all.find("1,0.10000000000000001,") != std::string::npos);
    const std::string thin = timeseries_csv(rows, 2);
    CHECK(thin.find("\n1,") == std::string::npos);
    CHECK(thin.find("\n2,") != std::string::npos);
}

TEST_CASE("classification run writes report and csv files") {
    const ScenarioConfig cfg = parse_config(kSmall, "small.cfg");
    const fs::path dir = fresh_dir("classify");
    const std::string report = run_scenario(cfg, {dir, true});
    CHECK(report.find("prediction = v_wins") != std::string::npos);
    CHECK(report.find("matches = 2/2") != std::string::npos);
    CHECK(fs::exists(dir / "report.txt"));
    CHECK(fs::exists(dir / "run_000.csv"));
    CHECK(fs::exists(dir / "run_001.csv"));

    const fs::path again = fresh_dir("classify_again");
    run_scenario(cfg, {again, true});
    CHECK(slurp(dir / "run_001.csv") == slurp(again / "run_001.csv"));
    CHECK(slurp(dir / "run_001.csv").rfind(kTimeseriesHeader, 0) == 0);
}

TEST_CASE("steady, stability and simulate runners") {
    const ScenarioConfig cfg = parse_config(kSmall, "small.cfg");
    const fs::path dir = fresh_dir("runners");
    CHECK(run_steady(cfg, {dir, true}).find("u_d") != std::string::npos);
    CHECK(fs::exists(dir / "run_steady.csv"));
    CHECK(run_stability(cfg, {dir, true}).find("mu = 0.75") != std::string::npos);
    CHECK(run_simulate(cfg, {dir, true}).find("limit = v_wins") != std::string::npos);

    const ScenarioConfig dead = parse_config("grid.n = 30\ncoef.m = -1\n", "dead.cfg");
    try {
        run_stability(dead, {dir, true});
        FAIL("missing semi-trivial state accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Hypothesis);
    }
}

TEST_CASE("sweep table") {
    const ScenarioConfig cfg = parse_config(R"(
grid.n = 30
sweep.b = 0.25,2
sweep.c = 0.25,2
sweep.filter = weak
sweep.threads = 2
control.n_inits = 1
control.horizon = 100
control.bracket_horizon = 1000
)", "sweep.cfg");
    const fs::path dir = fresh_dir("sweep");
    const auto rows = run_sweep(cfg, {dir, true});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].prediction == "unique_coexistence_GAS");
    CHECK(rows[1].prediction == "v_wins_GAS");
    CHECK(rows[2].prediction == "u_wins_GAS");
    for (const SweepRow& row : rows) {
        CHECK(row.error.empty());
        CHECK(row.match_rate == 1.0);
    }
    const std::string text = slurp(dir / "sweep.csv");
    CHECK(text.rfind(std::string(kSweepHeader) + "\nindex,b,c,mu,nu,case,prediction,status,match_rate,error\n", 0) == 0);
    CHECK_FALSE(fs::exists(dir / "sweep.csv.partial"));

    const ScenarioConfig none = parse_config("grid.n = 30\nsweep.b = 2,3\nsweep.c = 2\nsweep.filter = weak\n", "none.cfg");
    CHECK_THROWS_AS(run_sweep(none, {dir, true}), Error);
}

}
