#pragma once

#include "nlcomp/competition.hpp"
#include "nlcomp/single_species.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nlcomp {

/// u_d solves the u-equation with v = 0 and v_D the v-equation with u = 0.
struct SemiTrivialStates {
    SteadyStateResult u;
    SteadyStateResult v;
};

SemiTrivialStates solve_semi_trivial(const ModelParams& params);

struct StabilityExponents {
    double mu = 0.0;            ///< spectral bound of D P + (M - b u_d), stability of (u_d, 0)
    double nu = 0.0;            ///< spectral bound of d K + (m - c v_D), stability of (0, v_D)
    double neutral_band = 0.0;  ///< 1e-8 (1 + |M|_inf + |m|_inf)
    SpectralReport mu_report;
    SpectralReport nu_report;
};

/// Throws Error(Contract) when u_d or v_D is not a steady state to 1e-8.
StabilityExponents stability_exponents(const ModelParams& params, const StateField& u_d, const StateField& v_D);

enum class CaseKind { BothUnstable, USemitrivialUnstable, VSemitrivialUnstable, Degenerate };
enum class Prediction { UniqueCoexistence, VWins, UWins, Continuum, None };
enum class ClassStatus { Ok, InconsistentDegenerate, BoundaryUndetermined };

const char* to_string(CaseKind kind);
const char* to_string(Prediction prediction);
const char* to_string(ClassStatus status);

struct ClassificationEvidence {
    double mu = 0.0;
    double nu = 0.0;
    double neutral_band = 0.0;
    double competition_product = 0.0;  ///< max b * max c
    double self_product = 0.0;         ///< min b1 * min c1
    double state_gap = 0.0;            ///< |b u_d - c1 v_D|_inf
    double state_scale = 0.0;          ///< |c1 v_D|_inf
    double coefficient_spread = 0.0;   ///< largest relative spread of b, c, b1, c1
    bool certificate = false;
};

struct ClassificationOutcome {
    CaseKind kind = CaseKind::BothUnstable;
    Prediction prediction = Prediction::None;
    ClassStatus status = ClassStatus::Ok;
    ClassificationEvidence evidence;
    StateField u_d;
    StateField v_D;
    StabilityExponents exponents;
};

/// Sign pattern of (mu, nu) with the neutral band. Throws Error(Unsupported)
/// under strong competition or an asymmetric kernel, and Error(Hypothesis)
/// when a semi-trivial state does not exist.
ClassificationOutcome classify(const ModelParams& params);
ClassificationOutcome classify(const ModelParams& params, const SemiTrivialStates& semi);

/// The attractor a trajectory should approach under a prediction.
LimitType expected_limit(Prediction prediction);

/// Builds the candidate set used to classify trajectories.
AttractorSet attractors_for(const ClassificationOutcome& outcome);

struct VerifyOptions {
    int n_inits = 8;
    double horizon = 200.0;
    std::uint64_t seed = 1;
    double bracket_horizon = 5000.0;
    double classify_threshold = 1e-4;
};

struct VerificationRun {
    SystemState init;
    SimulationOutcome outcome;
    bool matches = false;
};

struct VerificationReport {
    Prediction prediction = Prediction::None;
    int total = 0;
    int matches = 0;
    double max_residual = 0.0;
    std::vector<double> s_estimates;
    double s_spread = 0.0;
    std::optional<BracketReport> bracket;
    std::string bracket_error;
    std::vector<VerificationRun> runs;
    std::vector<std::string> notes;
};

/// Seeded random positive initial data (per-node noise with random
/// amplitudes), bounded by the growth cap.
std::vector<SystemState> random_initial_states(const ModelParams& params, int count, std::uint64_t seed);

/// Simulates a seeded battery of positive initial data (and the monotone
/// bracket when both semi-trivial states are unstable) and tallies the runs
/// whose limit matches the prediction. Mismatches are reported, not thrown.
VerificationReport verify_prediction(const ModelParams& params, const ClassificationOutcome& outcome,
                                     const VerifyOptions& options = {});

struct ContinuumRow {
    double s = 0.0;
    double residual_u = 0.0;
    double residual_v = 0.0;
};

struct ContinuumTable {
    std::vector<ContinuumRow> rows;
    double tolerance = 0.0;  ///< 1e-8 (1 + |u_d|_inf)
    bool all_pass = false;
    bool certificate = false;
    std::string advisory;  ///< set when called without the degenerate certificate
};

/// Steady residuals along (s u_d, (1-s) v_D).
ContinuumTable continuum_check(const ModelParams& params, const StateField& u_d, const StateField& v_D,
                               const std::vector<double>& s_samples);

struct NonexistenceReport {
    double i1 = 0.0;        ///< h sum (c1 v_D^3 - b u_d v_D^2)
    double i2 = 0.0;        ///< h sum (b1 u_d^3 - c v_D u_d^2)
    double combined = 0.0;  ///< h sum (b u_d - c1 v_D)^2 (b u_d + c1 v_D)
    bool mu_implication = true;  ///< mu <= 0 implies i1 <= 1e-10
    bool nu_implication = true;  ///< nu <= 0 implies i2 <= 1e-10
    bool consistent = true;
};

NonexistenceReport nonexistence_probe(const ModelParams& params, const StateField& u_d, const StateField& v_D,
                                      const StabilityExponents& exponents);

}  // namespace nlcomp
