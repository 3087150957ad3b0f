#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace nlcomp {

/// Seedable generator named by an algorithm identifier. Doubles are built from
/// the top 53 bits so any mt19937-64 implementation reproduces them.
class Rng {
public:
    static constexpr std::string_view kAlgorithm = "mt19937_64";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// uniform in [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace nlcomp
