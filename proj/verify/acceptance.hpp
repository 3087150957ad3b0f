#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nlcomp::acceptance {

struct Criterion {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;  ///< measured values
    double seconds = 0.0;
};

struct SuiteOptions {
    std::vector<int> only;  ///< empty: run all
    int broken = 0;         ///< test mode: criterion whose tolerances are made unsatisfiable
    bool timing = false;    ///< append wall time to each line
};

inline constexpr int kCriterionCount = 11;

/// Runs the acceptance list and prints one PASS/FAIL line per criterion.
std::vector<Criterion> run_suite(const SuiteOptions& options, std::ostream& out);

}  // namespace nlcomp::acceptance
