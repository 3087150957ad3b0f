#pragma once

#include "nlcomp/classifier.hpp"
#include "nlcomp/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace nlcomp {

inline constexpr const char* kTimeseriesHeader = "# nlcomp-timeseries v1";
inline constexpr const char* kSweepHeader = "# nlcomp-sweep v1";

/// Versioned CSV: header comment, column row, then every `every`-th sample.
/// Doubles are printed with 17 significant digits so output is reproducible.
std::string timeseries_csv(const std::vector<TimeSeriesRow>& rows, int every = 1);

struct RunContext {
    std::filesystem::path out_dir = ".";
    bool quiet = false;
};

/// Each runner writes its report (and CSVs) under ctx.out_dir and returns the
/// report text. Errors propagate as nlcomp::Error.
std::string run_steady(const ScenarioConfig& config, const RunContext& ctx);
std::string run_stability(const ScenarioConfig& config, const RunContext& ctx);
std::string run_simulate(const ScenarioConfig& config, const RunContext& ctx);

/// Full pipeline: operators, semi-trivial states, exponents, classification,
/// verification (unless disabled), report and one CSV per simulation.
std::string run_scenario(const ScenarioConfig& config, const RunContext& ctx);

struct SweepRow {
    std::vector<double> values;  ///< one per axis, in axis order
    double mu = 0.0;
    double nu = 0.0;
    std::string kind;
    std::string prediction;
    std::string status;
    double match_rate = 0.0;
    std::string error;
};

/// One row per combination of the sweep axes, run on a worker pool. Rows are
/// appended to `<name>.partial` as they finish and the final table is sorted
/// by combination index. Per-row failures land in the error column.
std::vector<SweepRow> run_sweep(const ScenarioConfig& config, const RunContext& ctx,
                                const std::string& file_name = "sweep.csv");

std::string sweep_csv(const ScenarioConfig& config, const std::vector<SweepRow>& rows);

}  // namespace nlcomp
