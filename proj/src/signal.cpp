#include "spars/signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace spars {

WindowVector window(const TimeSeries& series, Eigen::Index L, Eigen::Index t) {
    const Eigen::Index n = series.length();
    if (L < 1)
        throw RangeError("window: L must be >= 1, got " + std::to_string(L));
    if (L > n)
        throw RangeError("window: L = " + std::to_string(L) + " exceeds series length " +
                         std::to_string(n));
    if (t < L || t > n)
        throw RangeError("window: t = " + std::to_string(t) + " outside [L, N] = [" +
                         std::to_string(L) + ", " + std::to_string(n) + "]");
    WindowVector w;
    w.entries = series.values().segment(t - L, L);
    w.t = t;
    return w;
}

TrajectoryMatrix hankel(const TimeSeries& series, Eigen::Index L) {
    const Eigen::Index n = series.length();
    if (L < 1)
        throw RangeError("hankel: L must be >= 1, got " + std::to_string(L));
    if (L > n)
        throw RangeError("hankel: L = " + std::to_string(L) + " exceeds series length " +
                         std::to_string(n));
    TrajectoryMatrix H;
    H.L = L;
    H.N = n;
    H.data.resize(L, n - L + 1);
    for (Eigen::Index j = 0; j < n - L + 1; ++j)
        H.data.col(j) = series.values().segment(j, L);
    return H;
}

Vector autocorrelation(const TimeSeries& series, Eigen::Index max_lag) {
    const Eigen::Index n = series.length();
    if (max_lag < 1 || max_lag >= n)
        throw RangeError("autocorrelation: max_lag must satisfy 1 <= max_lag < N, got " +
                         std::to_string(max_lag));
    const Vector centered = series.values().array() - series.values().mean();
    const double var = centered.squaredNorm() / static_cast<double>(n);
    if (var <= 0.0)
        throw DegenerateInputError("autocorrelation: constant series has zero variance");
    Vector rho(max_lag + 1);
    for (Eigen::Index lag = 0; lag <= max_lag; ++lag) {
        const double cov =
            centered.head(n - lag).dot(centered.tail(n - lag)) / static_cast<double>(n);
        rho[lag] = cov / var;
    }
    return rho;
}

namespace {

// First lag l >= 2 that is a local ACF maximum above the significance floor.
Eigen::Index acf_peak_lag(const Vector& rho, Eigen::Index n) {
    const double floor_level = std::max(0.2, 2.0 / std::sqrt(static_cast<double>(n)));
    const Eigen::Index max_lag = rho.size() - 1;
    for (Eigen::Index l = 2; l <= max_lag; ++l) {
        const double left = rho[l - 1];
        const double right = (l + 1 <= max_lag) ? rho[l + 1] : -1.0;
        if (rho[l] >= floor_level && rho[l] >= left && rho[l] >= right)
            return l;
    }
    return 0;
}

}  // namespace

LagEstimate estimate_lag(const TimeSeries& series) {
    const Eigen::Index n = series.length();
    if (n < 8)
        throw RangeError("estimate_lag: need at least 8 samples, got " + std::to_string(n));
    const Eigen::Index max_lag = n / 2;
    Vector rho;
    try {
        rho = autocorrelation(series, max_lag);
    } catch (const DegenerateInputError&) {
        // constant series: period 1 describes it; treat as the no-peak fallback
        return {std::max<Eigen::Index>(1, n / 4), true};
    }
    const Eigen::Index peak = acf_peak_lag(rho, n);
    if (peak == 0)
        return {std::max<Eigen::Index>(1, n / 4), true};
    return {peak, false};
}

bool aep_holds(const TimeSeries& series, double epsilon, Eigen::Index T, Eigen::Index S) {
    const Eigen::Index n = series.length();
    for (Eigen::Index t = S; t + T <= n; ++t)
        for (Eigen::Index k = 1; t + k * T <= n; ++k)
            if (std::abs(series.at(t + k * T) - series.at(t)) > epsilon)
                return false;
    return true;
}

namespace {

// Smallest S whose tail passes the AEP test at period T, or 0 when even the
// shortest testable tail fails. S is one past the last failing index.
Eigen::Index smallest_tail_start(const TimeSeries& series, double epsilon, Eigen::Index T) {
    const Eigen::Index n = series.length();
    Eigen::Index last_bad = 0;
    for (Eigen::Index t = 1; t + T <= n; ++t) {
        for (Eigen::Index k = 1; t + k * T <= n; ++k) {
            if (std::abs(series.at(t + k * T) - series.at(t)) > epsilon) {
                last_bad = t;
                break;
            }
        }
    }
    const Eigen::Index S = last_bad + 1;
    return (S + T <= n) ? S : 0;
}

// Period candidates: the first dominant ACF peak, remaining peaks by
// descending correlation, then the floor(N/4) fallback.
std::vector<Eigen::Index> period_candidates(const TimeSeries& series) {
    const Eigen::Index n = series.length();
    std::vector<Eigen::Index> candidates;
    Vector rho;
    try {
        rho = autocorrelation(series, n / 2);
    } catch (const DegenerateInputError&) {
        rho = Vector();
    }
    if (rho.size() > 0) {
        const double floor_level = std::max(0.2, 2.0 / std::sqrt(static_cast<double>(n)));
        const Eigen::Index max_lag = rho.size() - 1;
        std::vector<Eigen::Index> peaks;
        for (Eigen::Index l = 2; l <= max_lag && 2 * l <= n; ++l) {
            const double left = rho[l - 1];
            const double right = (l + 1 <= max_lag) ? rho[l + 1] : -1.0;
            if (rho[l] >= floor_level && rho[l] >= left && rho[l] >= right)
                peaks.push_back(l);
        }
        if (!peaks.empty()) {
            candidates.push_back(peaks.front());
            std::vector<Eigen::Index> rest(peaks.begin() + 1, peaks.end());
            std::sort(rest.begin(), rest.end(), [&](Eigen::Index a, Eigen::Index b) {
                return rho[a] != rho[b] ? rho[a] > rho[b] : a < b;
            });
            candidates.insert(candidates.end(), rest.begin(), rest.end());
        }
    }
    const Eigen::Index fallback = std::max<Eigen::Index>(1, n / 4);
    if (candidates.empty() || candidates.front() != fallback) candidates.push_back(fallback);
    return candidates;
}

}  // namespace

AepProfile estimate_period(const TimeSeries& series, double epsilon) {
    const Eigen::Index n = series.length();
    if (n < 8)
        throw RangeError("estimate_period: need at least 8 samples, got " + std::to_string(n));

    AepProfile profile;
    profile.epsilon = epsilon;
    const std::vector<Eigen::Index> candidates = period_candidates(series);
    profile.T = candidates.front();
    if (n < 2 * profile.T)
        throw RangeError("estimate_period: need at least 2T = " +
                         std::to_string(2 * profile.T) + " samples, got " + std::to_string(n));

    for (const Eigen::Index T : candidates) {
        const Eigen::Index S = smallest_tail_start(series, epsilon, T);
        if (S > 0) {
            profile.T = T;
            profile.S = S;
            profile.satisfied = true;
            return profile;
        }
    }
    profile.S = n + 1;
    profile.satisfied = false;
    return profile;
}

}  // namespace spars
