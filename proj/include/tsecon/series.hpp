#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "tsecon/dates.hpp"
#include "tsecon/errors.hpp"

namespace tsecon {

/// Date-indexed, equally-spaced-in-trading-days series of real observations.
/// Dates are strictly increasing; values contain no gaps. Trading-day index
/// positions are the clock: calendar gaps (weekends, holidays) carry no
/// meaning beyond ordering.
class TimeSeries {
  public:
    TimeSeries() = default;

    TimeSeries(std::string name, std::vector<Date> dates, std::vector<double> values)
        : name_(std::move(name)), dates_(std::move(dates)), values_(std::move(values)) {
        if (dates_.size() != values_.size())
            throw Error("TimeSeries '" + name_ + "': dates and values differ in length");
        for (std::size_t i = 1; i < dates_.size(); ++i) {
            if (!(dates_[i - 1] < dates_[i]))
                throw Error("TimeSeries '" + name_ + "': dates must be strictly increasing");
        }
        for (double v : values_) {
            if (!std::isfinite(v))
                throw Error("TimeSeries '" + name_ + "': non-finite value");
        }
    }

    /// Convenience constructor for synthetic/test series: consecutive
    /// calendar days starting at 2000-01-03.
    static TimeSeries with_default_dates(std::string name, std::vector<double> values) {
        std::vector<Date> dates;
        dates.reserve(values.size());
        const Date start = Date::from_ymd(2000, 1, 3);
        for (std::size_t i = 0; i < values.size(); ++i) dates.push_back(start + static_cast<long>(i));
        return TimeSeries(std::move(name), std::move(dates), std::move(values));
    }

    const std::string& name() const { return name_; }
    const std::vector<Date>& dates() const { return dates_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    double operator[](std::size_t i) const { return values_[i]; }

    bool aligned_with(const TimeSeries& other) const { return dates_ == other.dates_; }

    TimeSeries renamed(std::string name) const { return TimeSeries(std::move(name), dates_, values_); }

  private:
    std::string name_;
    std::vector<Date> dates_;
    std::vector<double> values_;
};

struct SummaryStats {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double sd = 0.0;
    double first_value = 0.0;
    double last_value = 0.0;
    std::size_t n = 0;
};

struct VolatilitySpec {
    std::size_t window = 100;
    enum class ReturnKind { simple_percent } return_kind = ReturnKind::simple_percent;
};

inline double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Sample standard deviation (n-1 denominator); 0 for n < 2.
inline double sample_sd(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

/// Iterated first difference. Result keeps the surviving (later) dates.
inline TimeSeries difference(const TimeSeries& s, std::size_t order = 1) {
    if (order == 0) return s;
    if (s.size() <= order)
        throw InsufficientData("difference: series '" + s.name() + "' has " +
                               std::to_string(s.size()) + " points, need more than " +
                               std::to_string(order));
    std::vector<double> v(s.values());
    for (std::size_t k = 0; k < order; ++k) {
        for (std::size_t i = v.size() - 1; i > 0; --i) v[i] -= v[i - 1];
        v.erase(v.begin());
    }
    std::vector<Date> dates(s.dates().begin() + static_cast<long>(order), s.dates().end());
    return TimeSeries("diff" + std::to_string(order) + "(" + s.name() + ")", std::move(dates),
                      std::move(v));
}

/// Inverse of difference for order 1, anchored at 0.
inline std::vector<double> cumulative_sum(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        acc += v[i];
        out[i] = acc;
    }
    return out;
}

/// Simple percent returns: r_t = 100 * (s_t - s_{t-1}) / s_{t-1}.
inline TimeSeries simple_returns(const TimeSeries& s) {
    if (s.size() < 2) throw InsufficientData("simple_returns: need at least 2 observations");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s[i] > 0.0))
            throw InvalidPrice("simple_returns: nonpositive price at " + s.dates()[i].to_string());
    }
    std::vector<double> r(s.size() - 1);
    for (std::size_t i = 1; i < s.size(); ++i) r[i - 1] = 100.0 * (s[i] - s[i - 1]) / s[i - 1];
    std::vector<Date> dates(s.dates().begin() + 1, s.dates().end());
    return TimeSeries("ret(" + s.name() + ")", std::move(dates), std::move(r));
}

/// Rolling volatility: sample sd of the `window` most recent simple percent
/// returns, right-aligned. The first `window` observations of the price
/// series produce no output, so the result is `window` points shorter.
inline TimeSeries rolling_volatility(const TimeSeries& s, const VolatilitySpec& spec) {
    if (spec.window < 2) throw Error("rolling_volatility: window must be at least 2");
    if (s.size() <= spec.window)
        throw InsufficientData("rolling_volatility: series of " + std::to_string(s.size()) +
                               " points is too short for window " + std::to_string(spec.window));
    const TimeSeries rets = simple_returns(s);
    const std::size_t w = spec.window;
    const std::size_t n_out = s.size() - w;
    std::vector<double> vol(n_out);
    const auto& r = rets.values();
    for (std::size_t i = 0; i < n_out; ++i) {
        // window of returns ending at price index i + w
        double m = 0.0;
        for (std::size_t j = i; j < i + w; ++j) m += r[j];
        m /= static_cast<double>(w);
        double ss = 0.0;
        for (std::size_t j = i; j < i + w; ++j) ss += (r[j] - m) * (r[j] - m);
        vol[i] = std::sqrt(ss / static_cast<double>(w - 1));
    }
    std::vector<Date> dates(s.dates().begin() + static_cast<long>(w), s.dates().end());
    return TimeSeries("vol(" + s.name() + ")", std::move(dates), std::move(vol));
}

namespace detail {

/// Linear-interpolation quantile on sorted data (the "type 7" convention).
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace detail

inline SummaryStats summarize(const TimeSeries& s) {
    if (s.empty()) throw InsufficientData("summarize: empty series");
    std::vector<double> sorted(s.values());
    std::sort(sorted.begin(), sorted.end());
    SummaryStats st;
    st.n = s.size();
    st.min = sorted.front();
    st.max = sorted.back();
    st.q1 = detail::quantile_sorted(sorted, 0.25);
    st.median = detail::quantile_sorted(sorted, 0.50);
    st.q3 = detail::quantile_sorted(sorted, 0.75);
    st.mean = mean_of(s.values());
    st.sd = sample_sd(s.values());
    st.first_value = s.values().front();
    st.last_value = s.values().back();
    return st;
}

}  // namespace tsecon
