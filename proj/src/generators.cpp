#include "spars/generators.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace spars {

namespace {

// Smooth seasonal pattern: fundamental plus two damped harmonics, so the ACF
// peaks at the period and the signal obeys a low-order exact recurrence.
Vector periodic_pattern(Eigen::Index period) {
    Vector pattern(period);
    const double w = 2.0 * std::numbers::pi / static_cast<double>(period);
    for (Eigen::Index i = 0; i < period; ++i) {
        const double t = static_cast<double>(i);
        pattern[i] = std::sin(w * t) + 0.4 * std::sin(2.0 * w * t + 0.9) +
                     0.2 * std::sin(3.0 * w * t + 2.1);
    }
    return pattern;
}

}  // namespace

TimeSeries generate_series(const std::string& kind, const GeneratorParams& params) {
    if (params.n < 1)
        throw RangeError("generate_series: n must be >= 1");
    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector values(params.n);

    if (kind == "sine") {
        for (Eigen::Index t = 0; t < params.n; ++t)
            values[t] = params.amplitude *
                        std::sin(2.0 * std::numbers::pi * static_cast<double>(t + 1) /
                                 static_cast<double>(params.period));
    } else if (kind == "alternating") {
        for (Eigen::Index t = 0; t < params.n; ++t)
            values[t] = (t % 2 == 0) ? params.amplitude : -params.amplitude;
    } else if (kind == "aep") {
        // aperiodic head, then an exactly repeating smooth pattern
        const Vector pattern = periodic_pattern(params.period) * params.amplitude;
        std::uniform_real_distribution<double> head_dist(-2.0 * params.amplitude,
                                                         2.0 * params.amplitude);
        for (Eigen::Index t = 0; t < params.n; ++t)
            values[t] = t < params.head ? head_dist(rng)
                                        : pattern[(t - params.head) % params.period];
    } else if (kind == "noisy-periodic") {
        const Vector pattern = periodic_pattern(params.period) * params.amplitude;
        for (Eigen::Index t = 0; t < params.n; ++t)
            values[t] = pattern[t % params.period] + params.noise * gauss(rng);
    } else if (kind == "recurrence") {
        // sinusoid-generating recurrence x_{t+1} = 2 cos(w) x_t - x_{t-1}
        const double omega = 2.0 * std::numbers::pi / static_cast<double>(params.period);
        const double a = 2.0 * std::cos(omega);
        values[0] = 0.0;
        if (params.n > 1) values[1] = params.amplitude * std::sin(omega);
        for (Eigen::Index t = 2; t < params.n; ++t)
            values[t] = a * values[t - 1] - values[t - 2];
    } else {
        throw RangeError("generate_series: unknown kind '" + kind + "'");
    }

    if (kind != "noisy-periodic" && params.noise > 0.0)
        for (Eigen::Index t = 0; t < params.n; ++t) values[t] += params.noise * gauss(rng);

    return TimeSeries(values, kind);
}

}  // namespace spars
