#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "spars/signal.hpp"
#include "support/oracles.hpp"

using namespace spars;

namespace {

TimeSeries alternating(int n, double amplitude = 1.0) {
    Vector v(n);
    for (int t = 0; t < n; ++t) v[t] = (t % 2 == 0) ? amplitude : -amplitude;
    return TimeSeries(v);
}

TimeSeries sine(int n, double period) {
    Vector v(n);
    for (int t = 1; t <= n; ++t)
        v[t - 1] = std::sin(2.0 * std::numbers::pi * t / period);
    return TimeSeries(v);
}

// first lag l >= 2 that is a local maximum above the significance floor,
// evaluated on an independently computed ACF
int oracle_first_peak(const std::vector<double>& rho, int n) {
    const double floor_level = std::max(0.2, 2.0 / std::sqrt(static_cast<double>(n)));
    const int max_lag = static_cast<int>(rho.size()) - 1;
    for (int l = 2; l <= max_lag; ++l) {
        const double right = l + 1 <= max_lag ? rho[static_cast<std::size_t>(l) + 1] : -1.0;
        if (rho[static_cast<std::size_t>(l)] >= floor_level &&
            rho[static_cast<std::size_t>(l)] >= rho[static_cast<std::size_t>(l) - 1] &&
            rho[static_cast<std::size_t>(l)] >= right)
            return l;
    }
    return 0;
}

}  // namespace

TEST_CASE("window extracts x_L(t) oldest first") {
    const TimeSeries s{1, 2, 3, 4, 5};
    const WindowVector w = window(s, 2, 3);
    CHECK(w.entries.size() == 2);
    CHECK(w.entries[0] == 2.0);
    CHECK(w.entries[1] == 3.0);
    CHECK(w.t == 3);

    const WindowVector singleton = window(TimeSeries{7}, 1, 1);
    CHECK(singleton.entries[0] == 7.0);

    const WindowVector full = window(s, 5, 5);
    for (int i = 0; i < 5; ++i) CHECK(full.entries[i] == i + 1);
}

TEST_CASE("window range errors") {
    const TimeSeries s{1, 2, 3, 4, 5};
    CHECK_THROWS_AS(window(s, 3, 2), RangeError);   // t < L
    CHECK_THROWS_AS(window(s, 2, 6), RangeError);   // t > N
    CHECK_THROWS_AS(window(s, 6, 6), RangeError);   // L > N
    CHECK_THROWS_AS(window(s, 0, 1), RangeError);
}

TEST_CASE("hankel matches the trajectory layout") {
    const TrajectoryMatrix H = hankel(TimeSeries{1, 2, 3, 4, 5}, 2);
    CHECK(H.data.rows() == 2);
    CHECK(H.data.cols() == 4);
    Matrix expected(2, 4);
    expected << 1, 2, 3, 4, 2, 3, 4, 5;
    CHECK((H.data - expected).norm() == 0.0);

    const TrajectoryMatrix single = hankel(TimeSeries{1, 2, 3}, 3);
    CHECK(single.data.cols() == 1);
    CHECK(single.data(0, 0) == 1.0);
    CHECK(single.data(2, 0) == 3.0);

    const TrajectoryMatrix row = hankel(TimeSeries{1, 2, 3, 4}, 1);
    CHECK(row.data.rows() == 1);
    CHECK(row.data.cols() == 4);

    CHECK_THROWS_AS(hankel(TimeSeries{1, 2}, 3), RangeError);
}

TEST_CASE("hankel anti-diagonal and window-column properties") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> value(-5.0, 5.0);
    std::uniform_int_distribution<int> length(4, 40);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = length(rng);
        Vector v(n);
        for (int i = 0; i < n; ++i) v[i] = value(rng);
        const TimeSeries s(v);
        const int L = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
        const TrajectoryMatrix H = hankel(s, L);

        for (Eigen::Index i = 0; i < H.data.rows(); ++i)
            for (Eigen::Index j = 0; j < H.data.cols(); ++j) {
                CHECK(H.data(i, j) == s.at(i + j + 1));      // entry (i,j) = x_{i+j-1}, 1-based
                if (i > 0 && j + 1 < H.data.cols())
                    CHECK(H.data(i, j) == H.data(i - 1, j + 1));
            }
        for (Eigen::Index j = 0; j < H.data.cols(); ++j) {
            const WindowVector w = window(s, L, L + j);
            CHECK((H.data.col(j) - w.entries).norm() == 0.0);
        }
    }
}

TEST_CASE("autocorrelation agrees with the brute-force oracle") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> raw(50);
    for (double& x : raw) x = gauss(rng);
    const TimeSeries s = TimeSeries::from_vector(raw);

    const Vector rho = autocorrelation(s, 20);
    const std::vector<double> expected = oracles::brute_force_acf(raw, 20);
    CHECK(rho[0] == doctest::Approx(1.0).epsilon(1e-15));
    for (int l = 0; l <= 20; ++l)
        CHECK(rho[l] == doctest::Approx(expected[static_cast<std::size_t>(l)]).epsilon(1e-12));
}

TEST_CASE("autocorrelation edge cases") {
    Vector constant = Vector::Constant(10, 5.0);
    CHECK_THROWS_AS(autocorrelation(TimeSeries(constant), 4), DegenerateInputError);

    // alternating: negative at lag 1, positive at lag 2
    const Vector rho = autocorrelation(alternating(16), 4);
    CHECK(rho[1] < 0.0);
    CHECK(rho[2] > 0.0);

    CHECK_THROWS_AS(autocorrelation(alternating(16), 16), RangeError);
}

TEST_CASE("sine ACF peaks at the period") {
    const TimeSeries s = sine(200, 20.0);
    std::vector<double> raw(200);
    for (int i = 0; i < 200; ++i) raw[static_cast<std::size_t>(i)] = s.at(i + 1);
    const std::vector<double> rho = oracles::brute_force_acf(raw, 100);
    CHECK(oracle_first_peak(rho, 200) == 20);
    CHECK(estimate_lag(s).L == 20);
    CHECK_FALSE(estimate_lag(s).fallback);
}

TEST_CASE("estimate_lag on alternating and degenerate inputs") {
    CHECK(estimate_lag(alternating(32)).L == 2);

    // seeded draw with no significant ACF peak: falls back to floor(N/4)
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector v(64);
    for (int i = 0; i < 64; ++i) v[i] = dist(rng);
    const LagEstimate lag = estimate_lag(TimeSeries(v));
    CHECK(lag.fallback);
    CHECK(lag.L == 16);

    CHECK_THROWS_AS(estimate_lag(TimeSeries{1, 2, 3}), RangeError);
}

TEST_CASE("estimate_period on exactly periodic signals") {
    const AepProfile profile = estimate_period(alternating(32), 0.0);
    CHECK(profile.T == 2);
    CHECK(profile.S == 1);
    CHECK(profile.satisfied);
}

TEST_CASE("estimate_period skips an aperiodic head") {
    // mild aperiodic head, exactly alternating tail
    Vector v(34);
    v[0] = 2.0;
    v[1] = 3.0;
    for (int t = 2; t < 34; ++t) v[t] = (t % 2 == 0) ? 1.0 : -1.0;
    const AepProfile profile = estimate_period(TimeSeries(v), 0.0);
    CHECK(profile.T == 2);
    CHECK(profile.S == 3);
    CHECK(profile.satisfied);
    CHECK(aep_holds(TimeSeries(v), 0.0, profile.T, profile.S));

    // an extreme head suppresses every ACF peak below the significance floor;
    // the fallback period still verifies against the tail
    Vector w(34);
    w[0] = 5.0;
    w[1] = 9.0;
    for (int t = 2; t < 34; ++t) w[t] = (t % 2 == 0) ? 1.0 : -1.0;
    const AepProfile hard = estimate_period(TimeSeries(w), 0.0);
    CHECK(hard.satisfied);
    CHECK(hard.S == 3);
    CHECK(hard.T % 2 == 0);
    CHECK(aep_holds(TimeSeries(w), 0.0, hard.T, hard.S));
}

TEST_CASE("estimate_period tolerates small noise within epsilon") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(200);
    for (int t = 1; t <= 200; ++t)
        v[t - 1] = std::sin(2.0 * std::numbers::pi * t / 20.0) + 0.001 * gauss(rng);
    const AepProfile profile = estimate_period(TimeSeries(v), 0.01);
    CHECK(profile.T == 20);
    CHECK(profile.satisfied);

    // unattainable tolerance
    const AepProfile strict = estimate_period(TimeSeries(v), 0.0);
    CHECK_FALSE(strict.satisfied);
    CHECK(strict.S == 201);
}

TEST_CASE("estimate_period is divisor-consistent on exactly periodic series") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> value(-1.0, 1.0);
    std::uniform_int_distribution<int> period_dist(2, 9);
    for (int trial = 0; trial < 12; ++trial) {
        const int T = period_dist(rng);
        std::vector<double> pattern(static_cast<std::size_t>(T));
        for (double& x : pattern) x = value(rng);
        const int n = 40 * T + 3;
        Vector v(n);
        bool constant = true;
        for (int t = 0; t < n; ++t) {
            v[t] = pattern[static_cast<std::size_t>(t % T)];
            if (v[t] != v[0]) constant = false;
        }
        if (constant) continue;
        const TimeSeries s(v);
        const AepProfile profile = estimate_period(s, 0.0);
        CHECK(profile.satisfied);
        CHECK(aep_holds(s, 0.0, profile.T, profile.S));
        CHECK(profile.T % T == 0);
    }
}
