#pragma once

#include <cstdint>
#include <string>

#include "spars/series.hpp"

namespace spars {

/// Parameters for the deterministic fixture generators. Fields are read per
/// kind; unused ones are ignored.
struct GeneratorParams {
    Eigen::Index n = 400;       // sample length
    Eigen::Index period = 20;   // period of the repeating pattern
    Eigen::Index head = 0;      // aperiodic head length (kind "aep")
    double noise = 0.0;         // additive Gaussian noise standard deviation
    double amplitude = 1.0;
    std::uint64_t seed = 0;
};

/// kinds: "sine", "alternating", "aep" (aperiodic head then periodic tail),
/// "noisy-periodic" (seeded random pattern plus noise), "recurrence"
/// (an exact two-term linear recurrence). Unknown kind -> RangeError.
TimeSeries generate_series(const std::string& kind, const GeneratorParams& params);

}  // namespace spars
