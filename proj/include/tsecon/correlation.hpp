#pragma once

#include <cmath>
#include <cstdlib>
#include <vector>

#include "tsecon/errors.hpp"
#include "tsecon/series.hpp"

namespace tsecon::correlation {

/// Correlogram: coefficients per lag plus the white-noise confidence band.
/// For ACF/PACF lags run 0..max_lag (PACF starts at 1); for CCF they run
/// -max_lag..max_lag.
struct CorrelogramResult {
    std::vector<int> lags;
    std::vector<double> coefficients;
    double confidence_band = 0.0;
    std::size_t n = 0;
};

namespace detail {

inline void require_variation(const TimeSeries& s, const char* op) {
    const double m = mean_of(s.values());
    double ss = 0.0;
    for (double v : s.values()) ss += (v - m) * (v - m);
    if (!(ss > 0.0)) throw DegenerateSeries(std::string(op) + ": series '" + s.name() + "' has zero variance");
}

/// Biased (divide-by-n) autocovariances about the global mean, lags 0..max_lag.
inline std::vector<double> autocovariances(const std::vector<double>& v, std::size_t max_lag) {
    const std::size_t n = v.size();
    const double m = mean_of(v);
    std::vector<double> gamma(max_lag + 1, 0.0);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double acc = 0.0;
        for (std::size_t t = k; t < n; ++t) acc += (v[t] - m) * (v[t - k] - m);
        gamma[k] = acc / static_cast<double>(n);
    }
    return gamma;
}

}  // namespace detail

inline CorrelogramResult acf(const TimeSeries& s, std::size_t max_lag) {
    if (max_lag >= s.size()) throw InsufficientData("acf: max_lag must be smaller than the series length");
    detail::require_variation(s, "acf");
    const auto gamma = detail::autocovariances(s.values(), max_lag);
    CorrelogramResult res;
    res.n = s.size();
    res.confidence_band = 1.96 / std::sqrt(static_cast<double>(s.size()));
    res.lags.reserve(max_lag + 1);
    res.coefficients.reserve(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        res.lags.push_back(static_cast<int>(k));
        res.coefficients.push_back(gamma[k] / gamma[0]);
    }
    return res;
}

/// Partial autocorrelations by the Durbin-Levinson recursion, lags 1..max_lag.
inline CorrelogramResult pacf(const TimeSeries& s, std::size_t max_lag) {
    if (max_lag == 0 || 2 * max_lag >= s.size())
        throw InsufficientData("pacf: require 0 < max_lag < n/2");
    detail::require_variation(s, "pacf");
    const auto gamma = detail::autocovariances(s.values(), max_lag);
    std::vector<double> rho(gamma.size());
    for (std::size_t k = 0; k < gamma.size(); ++k) rho[k] = gamma[k] / gamma[0];

    CorrelogramResult res;
    res.n = s.size();
    res.confidence_band = 1.96 / std::sqrt(static_cast<double>(s.size()));

    std::vector<double> phi_prev(max_lag + 1, 0.0), phi(max_lag + 1, 0.0);
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double num = rho[k];
        double den = 1.0;
        for (std::size_t j = 1; j < k; ++j) {
            num -= phi_prev[j] * rho[k - j];
            den -= phi_prev[j] * rho[j];
        }
        const double pk = den != 0.0 ? num / den : 0.0;
        phi[k] = pk;
        for (std::size_t j = 1; j < k; ++j) phi[j] = phi_prev[j] - pk * phi_prev[k - j];
        phi_prev = phi;
        res.lags.push_back(static_cast<int>(k));
        res.coefficients.push_back(pk);
    }
    return res;
}

/// Cross-correlation at lags -max_lag..max_lag, normalized by the product of
/// the two sample sds. Positive lag k pairs a_t with b_{t+k}, so a series
/// that leads shows its peak at positive lags of ccf(leader, follower).
inline CorrelogramResult ccf(const TimeSeries& a, const TimeSeries& b, std::size_t max_lag) {
    if (!a.aligned_with(b)) throw AlignmentError("ccf: series are not date-aligned");
    if (max_lag >= a.size()) throw InsufficientData("ccf: max_lag must be smaller than the series length");
    detail::require_variation(a, "ccf");
    detail::require_variation(b, "ccf");

    const auto& x = a.values();
    const auto& y = b.values();
    const std::size_t n = x.size();
    const double mx = mean_of(x), my = mean_of(y);
    double sx = 0.0, sy = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        sx += (x[t] - mx) * (x[t] - mx);
        sy += (y[t] - my) * (y[t] - my);
    }
    const double denom = std::sqrt(sx) * std::sqrt(sy);

    CorrelogramResult res;
    res.n = n;
    res.confidence_band = 1.96 / std::sqrt(static_cast<double>(n));
    for (long k = -static_cast<long>(max_lag); k <= static_cast<long>(max_lag); ++k) {
        double acc = 0.0;
        if (k >= 0) {
            for (std::size_t t = 0; t + static_cast<std::size_t>(k) < n; ++t)
                acc += (x[t] - mx) * (y[t + static_cast<std::size_t>(k)] - my);
        } else {
            const auto s = static_cast<std::size_t>(-k);
            for (std::size_t t = s; t < n; ++t) acc += (x[t] - mx) * (y[t - s] - my);
        }
        res.lags.push_back(static_cast<int>(k));
        res.coefficients.push_back(acc / denom);
    }
    return res;
}

}  // namespace tsecon::correlation
