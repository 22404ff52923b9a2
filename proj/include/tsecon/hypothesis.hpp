#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsecon/dates.hpp"
#include "tsecon/distributions.hpp"
#include "tsecon/errors.hpp"
#include "tsecon/series.hpp"

namespace tsecon::hypothesis {

struct Period {
    std::string label;
    Date start;  // inclusive
    Date end;    // inclusive
};

class PeriodSet {
  public:
    PeriodSet() = default;

    explicit PeriodSet(std::vector<Period> periods, bool require_disjoint = true)
        : periods_(std::move(periods)) {
        for (const auto& p : periods_) {
            if (p.end < p.start) throw Error("PeriodSet: period '" + p.label + "' ends before it starts");
        }
        for (std::size_t i = 0; i < periods_.size(); ++i) {
            for (std::size_t j = i + 1; j < periods_.size(); ++j) {
                if (periods_[i].label == periods_[j].label)
                    throw Error("PeriodSet: duplicate label '" + periods_[i].label + "'");
                if (require_disjoint && !(periods_[i].end < periods_[j].start ||
                                          periods_[j].end < periods_[i].start))
                    throw Error("PeriodSet: periods '" + periods_[i].label + "' and '" +
                                periods_[j].label + "' overlap");
            }
        }
    }

    const std::vector<Period>& periods() const { return periods_; }
    std::size_t size() const { return periods_.size(); }

  private:
    std::vector<Period> periods_;
};

struct TTestResult {
    double statistic = 0.0;
    double df = 0.0;
    double p_value = 1.0;
    double mean_estimate = 0.0;
    std::size_t n = 0;
    double level = 0.05;
    bool reject = false;
};

struct FTestResult {
    double statistic = 0.0;
    std::size_t df1 = 0;
    std::size_t df2 = 0;
    double p_value = 1.0;
    double restricted_rss = 0.0;
    double unrestricted_rss = 0.0;
};

struct RegressionFit {
    std::vector<double> coefficients;
    std::vector<double> residuals;
    double rss = 0.0;
    std::size_t n = 0;
    std::size_t k = 0;
};

/// One-sample t-test of H0: mean = 0 against a two-sided alternative.
inline TTestResult mean_zero_ttest(const TimeSeries& s, double level = 0.05) {
    if (s.size() < 2) throw InsufficientData("mean_zero_ttest: need at least 2 observations");
    const double sd = sample_sd(s.values());
    if (!(sd > 0.0)) throw DegenerateSeries("mean_zero_ttest: zero variance");
    TTestResult res;
    res.n = s.size();
    res.df = static_cast<double>(s.size() - 1);
    res.mean_estimate = mean_of(s.values());
    res.statistic = res.mean_estimate / (sd / std::sqrt(static_cast<double>(s.size())));
    res.p_value = dist::student_t_two_sided(res.statistic, res.df);
    res.level = level;
    res.reject = res.p_value < level;
    return res;
}

struct PeriodSlice {
    Period period;
    TimeSeries series;
    bool empty = false;
};

/// Restricts a series to each period (inclusive endpoints). Empty slices are
/// kept and flagged.
inline std::vector<PeriodSlice> split_by_periods(const TimeSeries& s, const PeriodSet& periods) {
    std::vector<PeriodSlice> out;
    out.reserve(periods.size());
    for (const auto& p : periods.periods()) {
        std::vector<Date> dates;
        std::vector<double> values;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (p.start <= s.dates()[i] && s.dates()[i] <= p.end) {
                dates.push_back(s.dates()[i]);
                values.push_back(s[i]);
            }
        }
        const bool empty = values.empty();
        out.push_back({p, TimeSeries(s.name() + "[" + p.label + "]", std::move(dates), std::move(values)),
                       empty});
    }
    return out;
}

enum class EntryStatus { ok, empty_period, not_computable };

struct DecouplingEntry {
    Period period;
    EntryStatus status = EntryStatus::ok;
    std::optional<TTestResult> test;
    std::size_t n = 0;
};

/// Per-period one-sample t-tests on the pointwise difference dy - dx.
/// Periods with no observations, or where the difference is degenerate
/// (identically constant), yield entries without a test result.
inline std::vector<DecouplingEntry> decoupling_table(const TimeSeries& dy, const TimeSeries& dx,
                                                     const PeriodSet& periods, double level = 0.05) {
    if (!dy.aligned_with(dx)) throw AlignmentError("decoupling_table: series are not date-aligned");
    std::vector<double> diff(dy.size());
    for (std::size_t i = 0; i < dy.size(); ++i) diff[i] = dy[i] - dx[i];
    const TimeSeries d(dy.name() + "-" + dx.name(), dy.dates(), std::move(diff));

    std::vector<DecouplingEntry> out;
    for (const auto& slice : split_by_periods(d, periods)) {
        DecouplingEntry entry;
        entry.period = slice.period;
        entry.n = slice.series.size();
        if (slice.empty) {
            entry.status = EntryStatus::empty_period;
        } else {
            try {
                entry.test = mean_zero_ttest(slice.series, level);
                entry.status = EntryStatus::ok;
            } catch (const Error&) {
                entry.status = EntryStatus::not_computable;
            }
        }
        out.push_back(std::move(entry));
    }
    return out;
}

/// Least-squares fit by rank-revealing QR. The design matrix is row-major:
/// design[i] is observation i's regressor row.
inline RegressionFit ols(const std::vector<double>& response,
                         const std::vector<std::vector<double>>& design) {
    const std::size_t n = response.size();
    if (n == 0 || design.size() != n) throw Error("ols: response/design size mismatch");
    const std::size_t k = design.front().size();
    if (n < k) throw SingularDesign("ols: fewer rows than columns");

    Eigen::MatrixXd x(n, k);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (design[i].size() != k) throw Error("ols: ragged design matrix");
        for (std::size_t j = 0; j < k; ++j) x(static_cast<long>(i), static_cast<long>(j)) = design[i][j];
        y(static_cast<long>(i)) = response[i];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<long>(k)) throw SingularDesign("ols: rank-deficient design matrix");

    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - x * beta;

    RegressionFit fit;
    fit.n = n;
    fit.k = k;
    fit.coefficients.assign(beta.data(), beta.data() + beta.size());
    fit.residuals.assign(resid.data(), resid.data() + resid.size());
    fit.rss = resid.squaredNorm();
    return fit;
}

namespace detail {

inline FTestResult f_from_rss(double rss_restricted, double rss_unrestricted,
                              std::size_t n_restrictions, std::size_t df2) {
    FTestResult res;
    res.df1 = n_restrictions;
    res.df2 = df2;
    res.restricted_rss = rss_restricted;
    res.unrestricted_rss = rss_unrestricted;
    const double num = (rss_restricted - rss_unrestricted) / static_cast<double>(n_restrictions);
    const double den = rss_unrestricted / static_cast<double>(df2);
    res.statistic = num <= 0.0 ? 0.0 : num / den;
    res.p_value = dist::f_sf(res.statistic, static_cast<double>(res.df1), static_cast<double>(res.df2));
    return res;
}

/// Builds the lagged design rows for t = p..n-1: [1, v[t-1], ..., v[t-p]].
inline void append_lags(std::vector<std::vector<double>>& rows, const std::vector<double>& v,
                        std::size_t p, std::size_t first_t) {
    for (std::size_t t = first_t, i = 0; t < v.size(); ++t, ++i) {
        for (std::size_t lag = 1; lag <= p; ++lag) rows[i].push_back(v[t - lag]);
    }
}

}  // namespace detail

/// Joint F-test of the p lag coefficients in
///   target_t = b0 + b1 leader_{t-1} + ... + bp leader_{t-p} + e_t
/// against the intercept-only model. The first p observations are dropped.
inline FTestResult leading_indicator_ftest(const TimeSeries& target, const TimeSeries& leader,
                                           std::size_t p = 10) {
    if (p == 0) throw Error("leading_indicator_ftest: lag count must be positive");
    if (!target.aligned_with(leader))
        throw AlignmentError("leading_indicator_ftest: series are not date-aligned");
    if (target.size() <= p + 2)
        throw InsufficientData("leading_indicator_ftest: series too short for p lags");

    const auto& yv = target.values();
    const auto& lv = leader.values();
    const std::size_t rows_n = yv.size() - p;

    std::vector<double> y(yv.begin() + static_cast<long>(p), yv.end());
    std::vector<std::vector<double>> x(rows_n, std::vector<double>{1.0});
    detail::append_lags(x, lv, p, p);

    const RegressionFit unrestricted = ols(y, x);
    const double ybar = mean_of(y);
    double rss_r = 0.0;
    for (double v : y) rss_r += (v - ybar) * (v - ybar);

    return detail::f_from_rss(rss_r, unrestricted.rss, p, rows_n - p - 1);
}

struct GrangerResult {
    FTestResult a_to_b;
    FTestResult b_to_a;
};

/// Bidirectional Granger test: does the history of one series improve the
/// autoregression of the other? Each direction compares the model with both
/// sets of p lags against own-lags only.
inline GrangerResult granger(const TimeSeries& a, const TimeSeries& b, std::size_t p) {
    if (p == 0) throw Error("granger: lag count must be positive");
    if (!a.aligned_with(b)) throw AlignmentError("granger: series are not date-aligned");
    if (a.size() <= 2 * p + 2) throw InsufficientData("granger: series too short for p lags");

    auto one_direction = [&](const std::vector<double>& cause, const std::vector<double>& effect) {
        const std::size_t rows_n = effect.size() - p;
        std::vector<double> y(effect.begin() + static_cast<long>(p), effect.end());
        std::vector<std::vector<double>> xr(rows_n, std::vector<double>{1.0});
        detail::append_lags(xr, effect, p, p);
        std::vector<std::vector<double>> xu = xr;
        detail::append_lags(xu, cause, p, p);
        const RegressionFit restricted = ols(y, xr);
        const RegressionFit unrestricted = ols(y, xu);
        return detail::f_from_rss(restricted.rss, unrestricted.rss, p, rows_n - 2 * p - 1);
    };

    return {one_direction(a.values(), b.values()), one_direction(b.values(), a.values())};
}

}  // namespace tsecon::hypothesis
