#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "tsecon/errors.hpp"
#include "tsecon/series.hpp"

namespace tsecon::unit_root {

enum class Deterministic { constant_and_trend };

struct AdfResult {
    double statistic = 0.0;
    double p_value = 0.5;  // interpolated; clamped to [0.01, 0.99]
    bool p_clamped = false;
    std::size_t lag_order = 0;
    std::size_t n_effective = 0;
    Deterministic deterministic = Deterministic::constant_and_trend;
};

/// Small-sample quantiles of the Dickey-Fuller tau distribution for the
/// regression with constant and linear trend. Banerjee, Dolado, Galbraith &
/// Hendry (1993, "Co-integration, Error Correction, and the Econometric
/// Analysis of Non-stationary Data"), Table 4.2.
namespace df_table {

inline constexpr std::array<double, 6> sample_sizes = {25, 50, 100, 250, 500, 100000};
inline constexpr std::array<double, 8> probabilities = {0.01, 0.025, 0.05, 0.10,
                                                        0.90, 0.95, 0.975, 0.99};
inline constexpr double quantiles[6][8] = {
    {-4.38, -3.95, -3.60, -3.24, -1.14, -0.80, -0.50, -0.15},
    {-4.15, -3.80, -3.50, -3.18, -1.19, -0.87, -0.58, -0.24},
    {-4.04, -3.73, -3.45, -3.15, -1.22, -0.90, -0.62, -0.28},
    {-3.99, -3.69, -3.43, -3.13, -1.23, -0.92, -0.64, -0.31},
    {-3.98, -3.68, -3.42, -3.13, -1.24, -0.93, -0.65, -0.32},
    {-3.96, -3.66, -3.41, -3.12, -1.25, -0.94, -0.66, -0.33},
};

}  // namespace df_table

struct DfPValue {
    double p = 0.5;
    bool clamped = false;
};

/// P-value for an ADF tau statistic (constant-and-trend case) by two-way
/// interpolation: each tabulated quantile is first interpolated in the sample
/// size, then the probability is interpolated across the quantiles. Outside
/// the table the value clamps to 0.01 / 0.99 and the clamp is flagged.
inline DfPValue df_pvalue_detail(double statistic, std::size_t n) {
    namespace tb = df_table;
    const double nn = static_cast<double>(n);

    std::array<double, 8> q{};
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (nn <= tb::sample_sizes.front()) {
            q[j] = tb::quantiles[0][j];
        } else if (nn >= tb::sample_sizes.back()) {
            q[j] = tb::quantiles[5][j];
        } else {
            std::size_t i = 0;
            while (tb::sample_sizes[i + 1] < nn) ++i;
            const double w =
                (nn - tb::sample_sizes[i]) / (tb::sample_sizes[i + 1] - tb::sample_sizes[i]);
            q[j] = tb::quantiles[i][j] + w * (tb::quantiles[i + 1][j] - tb::quantiles[i][j]);
        }
    }

    if (statistic <= q.front()) return {tb::probabilities.front(), true};
    if (statistic >= q.back()) return {tb::probabilities.back(), true};
    std::size_t j = 0;
    while (q[j + 1] < statistic) ++j;
    const double w = (statistic - q[j]) / (q[j + 1] - q[j]);
    return {tb::probabilities[j] + w * (tb::probabilities[j + 1] - tb::probabilities[j]), false};
}

inline double df_pvalue(double statistic, std::size_t n) { return df_pvalue_detail(statistic, n).p; }

/// Default augmentation lag, trunc((n-1)^(1/3)).
inline std::size_t default_adf_lag(std::size_t n) {
    return static_cast<std::size_t>(std::pow(static_cast<double>(n - 1), 1.0 / 3.0));
}

namespace detail {

/// Full OLS output of the ADF regression
///   d_t = beta0 + beta1 * trend + gamma * s_{t-1} + sum_i delta_i d_{t-i} + e_t
/// Column order: intercept, trend, lagged level, then the lagged differences.
struct AdfRegression {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd std_errors;
    double statistic = 0.0;
    double sigma2 = 0.0;
    std::size_t rows = 0;
};

inline AdfRegression adf_regression(const std::vector<double>& s, std::size_t k) {
    const std::size_t n = s.size();
    const std::size_t rows = n - 1 - k;
    const std::size_t cols = 3 + k;
    if (rows <= cols) throw InsufficientData("adf: too few observations for the requested lag order");

    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = s[i + 1] - s[i];

    Eigen::MatrixXd x(rows, cols);
    Eigen::VectorXd y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = k + r;  // index into d
        y(static_cast<long>(r)) = d[t];
        x(static_cast<long>(r), 0) = 1.0;
        x(static_cast<long>(r), 1) = static_cast<double>(r);
        x(static_cast<long>(r), 2) = s[t];
        for (std::size_t i = 1; i <= k; ++i) x(static_cast<long>(r), 2 + static_cast<long>(i)) = d[t - i];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<long>(cols))
        throw DegenerateSeries("adf: singular design matrix (constant or collinear series)");

    AdfRegression out;
    out.rows = rows;
    out.coefficients = qr.solve(y);
    const Eigen::VectorXd resid = y - x * out.coefficients;
    out.sigma2 = resid.squaredNorm() / static_cast<double>(rows - cols);

    const Eigen::MatrixXd r_fac =
        qr.matrixR().topLeftCorner(static_cast<long>(cols), static_cast<long>(cols))
            .triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r_fac.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(
            static_cast<long>(cols), static_cast<long>(cols)));
    const Eigen::MatrixXd xtx_inv =
        qr.colsPermutation() * (r_inv * r_inv.transpose()) * qr.colsPermutation().transpose();
    out.std_errors = (out.sigma2 * xtx_inv.diagonal()).cwiseSqrt();
    out.statistic = out.coefficients(2) / out.std_errors(2);
    return out;
}

}  // namespace detail

/// Augmented Dickey-Fuller test with constant and linear trend. The null is
/// a unit root; small statistics (large negative) reject it.
inline AdfResult adf_test(const TimeSeries& s, std::optional<std::size_t> lag_order = std::nullopt) {
    const std::size_t k = lag_order.value_or(default_adf_lag(s.size()));
    if (s.size() < 25 + k)
        throw InsufficientData("adf_test: need at least " + std::to_string(25 + k) +
                               " observations, have " + std::to_string(s.size()));
    const auto reg = detail::adf_regression(s.values(), k);
    AdfResult res;
    res.statistic = reg.statistic;
    res.lag_order = k;
    res.n_effective = reg.rows;
    const auto pv = df_pvalue_detail(reg.statistic, s.size() - 1);
    res.p_value = pv.p;
    res.p_clamped = pv.clamped;
    return res;
}

enum class JohansenDeterministic { none };

struct JohansenResult {
    // Index 0: H0 "r = 0"; index 1: H0 "r <= 1".
    std::array<double, 2> trace_statistics{};
    std::array<std::array<double, 3>, 2> critical_values{};  // 10%, 5%, 1%
    std::array<double, 2> eigenvalues{};
    std::size_t lag_order = 2;
    std::size_t n_effective = 0;
    JohansenDeterministic deterministic = JohansenDeterministic::none;

    bool reject_at(std::size_t rank_hypothesis, std::size_t level_index) const {
        return trace_statistics[rank_hypothesis] > critical_values[rank_hypothesis][level_index];
    }
};

/// Trace-test critical values for the two-variable system with an
/// unrestricted constant; Osterwald-Lenum (1992), Table 1.
inline constexpr std::array<std::array<double, 3>, 2> johansen_critical_values = {{
    {{15.66, 17.95, 23.52}},  // r = 0
    {{6.50, 8.18, 11.65}},    // r <= 1
}};

/// Johansen trace cointegration test for a bivariate system. The VAR has
/// `lag_order` lags in levels, so the error-correction form regresses the
/// differences on K-1 lagged differences (plus a constant) and forms the
/// reduced-rank eigenproblem between the difference residuals and the
/// residuals of the K-lagged levels.
inline JohansenResult johansen_trace(const TimeSeries& a, const TimeSeries& b,
                                     std::size_t lag_order = 2) {
    if (!a.aligned_with(b)) throw AlignmentError("johansen_trace: series are not date-aligned");
    if (lag_order < 2) throw Error("johansen_trace: lag_order must be at least 2");
    const std::size_t n_level = a.size();
    if (n_level < 10 * lag_order)
        throw InsufficientData("johansen_trace: need at least 10*lag_order observations");

    const std::size_t kk = lag_order;
    const std::size_t rows = n_level - kk;
    const std::size_t n_short = 1 + 2 * (kk - 1);  // constant + lagged differences

    Eigen::MatrixXd z0(rows, 2), zk(rows, 2), z2(rows, n_short);
    const auto& xa = a.values();
    const auto& xb = b.values();
    auto diff_at = [&](const std::vector<double>& v, std::size_t t) { return v[t + 1] - v[t]; };
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = r + kk - 1;  // index into the differenced series
        z0(static_cast<long>(r), 0) = diff_at(xa, t);
        z0(static_cast<long>(r), 1) = diff_at(xb, t);
        zk(static_cast<long>(r), 0) = xa[r];
        zk(static_cast<long>(r), 1) = xb[r];
        z2(static_cast<long>(r), 0) = 1.0;
        for (std::size_t j = 1; j < kk; ++j) {
            z2(static_cast<long>(r), static_cast<long>(2 * j - 1)) = diff_at(xa, t - j);
            z2(static_cast<long>(r), static_cast<long>(2 * j)) = diff_at(xb, t - j);
        }
    }

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z2);
    const Eigen::MatrixXd r0 = z0 - z2 * qr.solve(z0);
    const Eigen::MatrixXd r1 = zk - z2 * qr.solve(zk);

    const double nn = static_cast<double>(rows);
    const Eigen::Matrix2d s00 = r0.transpose() * r0 / nn;
    const Eigen::Matrix2d s11 = r1.transpose() * r1 / nn;
    const Eigen::Matrix2d s01 = r0.transpose() * r1 / nn;

    const Eigen::LLT<Eigen::Matrix2d> chol11(s11);
    const Eigen::LLT<Eigen::Matrix2d> chol00(s00);
    if (chol11.info() != Eigen::Success || chol00.info() != Eigen::Success)
        throw NumericalSingularity("johansen_trace: moment matrix not positive definite");
    const double scale11 = s11.diagonal().maxCoeff();
    const double scale00 = s00.diagonal().maxCoeff();
    if (s11.determinant() < 1e-12 * scale11 * scale11 ||
        s00.determinant() < 1e-12 * scale00 * scale00)
        throw NumericalSingularity("johansen_trace: near-singular moment matrix");

    // L^-1 S10 S00^-1 S01 L^-T with S11 = L L^T; symmetric by construction.
    const Eigen::Matrix2d l_inv =
        chol11.matrixL().solve(Eigen::Matrix2d::Identity());
    const Eigen::Matrix2d middle = s01.transpose() * chol00.solve(s01);
    const Eigen::Matrix2d sym = l_inv * middle * l_inv.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(0.5 * (sym + sym.transpose()));
    if (eig.info() != Eigen::Success)
        throw NumericalSingularity("johansen_trace: eigen decomposition failed");

    std::array<double, 2> lambda = {eig.eigenvalues()(1), eig.eigenvalues()(0)};  // descending
    for (double& l : lambda) l = std::clamp(l, 0.0, 1.0 - 1e-14);

    JohansenResult res;
    res.lag_order = kk;
    res.n_effective = rows;
    res.eigenvalues = lambda;
    res.trace_statistics[0] = -nn * (std::log1p(-lambda[0]) + std::log1p(-lambda[1]));
    res.trace_statistics[1] = -nn * std::log1p(-lambda[1]);
    res.critical_values = johansen_critical_values;
    return res;
}

}  // namespace tsecon::unit_root
