#pragma once

#include "nlcomp/competition.hpp"
#include "nlcomp/dispersal.hpp"
#include "nlcomp/kernel.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlcomp {

/// A coefficient or initial-data field: a constant or a named 1-D profile.
///   const   value
///   cosine  offset + amplitude cos(2 pi frequency x)
///   sine    offset + amplitude sin(2 pi frequency x)
///   bump    offset + amplitude exp(-((x - center) / width)^2)
struct ProfileSpec {
    enum class Kind { Const, Cosine, Sine, Bump };
    Kind kind = Kind::Const;
    double value = 0.0;
    double amplitude = 0.0;
    double frequency = 1.0;
    double offset = 0.0;
    double center = 0.5;
    double width = 0.1;

    static ProfileSpec constant(double value);
    PotentialField evaluate(const SpatialGrid& grid) const;
    std::string describe() const;
};

struct KernelChoice {
    KernelFamily family = KernelFamily::Gaussian;
    double scale = 0.1;  ///< sigma for gaussian, radius otherwise

    KernelSpec spec() const;
};

struct InitSpec {
    enum class Kind { Random, Constant, Profile };
    Kind kind = Kind::Random;
    ProfileSpec u = ProfileSpec::constant(0.5);
    ProfileSpec v = ProfileSpec::constant(0.5);
};

struct SweepAxis {
    std::string name;  ///< b, c, d, D, alpha or beta
    std::vector<double> values;
};

struct ScenarioConfig {
    std::string source;  ///< file name used in messages and reports

    double lo = 0.0;
    double hi = 1.0;
    std::size_t n = 200;

    KernelChoice kernel_u;
    KernelChoice kernel_v;
    BoundaryRegime regime = BoundaryRegime::no_flux();

    double d = 1.0;
    double D = 1.0;
    double alpha = 1.0;
    double beta = 1.0;

    std::map<std::string, ProfileSpec> coefficients;  ///< m, M, b, c, b1, c1

    InitSpec init;
    std::string rng_algorithm = "mt19937_64";
    std::uint64_t seed = 1;

    double horizon = 200.0;
    int n_inits = 8;
    double tolerance = 1e-10;
    double threshold = 1e-4;
    int s_samples = 11;
    bool verify = true;
    double bracket_horizon = 5000.0;

    std::string report = "report.txt";
    std::string csv_prefix = "run";
    int csv_every = 1;  ///< write every k-th unit-time sample

    std::vector<SweepAxis> sweep;
    bool sweep_weak_only = false;
    int sweep_threads = 0;  ///< 0: hardware concurrency (at most 8)
};

/// Parses the flat `key = value` format. Throws Error(Config) with the line
/// number and key on any problem; unknown and duplicate keys are rejected.
ScenarioConfig parse_config(std::string_view text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

/// Builds the model. `overrides` replaces sweep-able scalars (b, c, d, D,
/// alpha, beta) by name.
ModelParams build_model(const ScenarioConfig& config, const std::map<std::string, double>& overrides = {});

/// Initial data from the config; Random uses the seeded generator.
SystemState build_initial_state(const ScenarioConfig& config, const ModelParams& params);

/// Parses `lo:hi:count` or a comma list. Throws Error(Config) on an empty range.
std::vector<double> parse_range(std::string_view text);

}  // namespace nlcomp
