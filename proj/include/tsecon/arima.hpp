#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tsecon/errors.hpp"
#include "tsecon/optim.hpp"
#include "tsecon/series.hpp"
#include "tsecon/unit_root.hpp"

namespace tsecon::arima {

struct ArimaOrder {
    int p = 0;
    int d = 0;
    int q = 0;

    std::string to_string() const {
        return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
    }
    auto operator<=>(const ArimaOrder&) const = default;
};

/// Coefficients on the natural scale. The model for the d-times differenced
/// series w_t is
///   w_t - mu = sum_i ar_i (w_{t-i} - mu) + e_t + sum_j ma_j e_{t-j},
/// with e_t ~ N(0, sigma2).
struct ArimaParams {
    std::vector<double> ar;
    std::vector<double> ma;
    double intercept = 0.0;
    double sigma2 = 1.0;
};

struct ArimaFit {
    ArimaOrder order;
    std::vector<double> ar_coefficients;
    std::vector<double> ma_coefficients;
    double intercept = 0.0;
    double sigma2 = 0.0;
    double log_likelihood = 0.0;
    double aicc = 0.0;
    bool converged = false;
    int iterations = 0;
};

// ---------------------------------------------------------------------------
// Stationarity region parameterization
// ---------------------------------------------------------------------------

/// Levinson-Durbin step: partial autocorrelations in (-1,1) -> coefficients
/// c of a polynomial 1 - sum c_j z^j with all roots outside the unit circle.
inline std::vector<double> pacf_to_coeffs(const std::vector<double>& pac) {
    std::vector<double> out;
    out.reserve(pac.size());
    for (std::size_t k = 0; k < pac.size(); ++k) {
        std::vector<double> next(k + 1);
        next[k] = pac[k];
        for (std::size_t j = 0; j < k; ++j) next[j] = out[j] - pac[k] * out[k - 1 - j];
        out = std::move(next);
    }
    return out;
}

/// Inverse of pacf_to_coeffs. Returns nullopt when the polynomial has a root
/// on or inside the unit circle.
inline std::optional<std::vector<double>> coeffs_to_pacf(std::vector<double> c) {
    std::vector<double> pac(c.size());
    for (std::size_t k = c.size(); k-- > 0;) {
        const double last = c[k];
        if (!(std::abs(last) < 1.0)) return std::nullopt;
        pac[k] = last;
        const double denom = 1.0 - last * last;
        std::vector<double> prev(k);
        for (std::size_t j = 0; j < k; ++j) prev[j] = (c[j] + last * c[k - 1 - j]) / denom;
        c = std::move(prev);
    }
    return pac;
}

inline bool ar_is_stationary(const std::vector<double>& ar) {
    return ar.empty() || coeffs_to_pacf(ar).has_value();
}

inline bool ma_is_invertible(const std::vector<double>& ma) {
    if (ma.empty()) return true;
    std::vector<double> c(ma.size());
    for (std::size_t j = 0; j < ma.size(); ++j) c[j] = -ma[j];
    return coeffs_to_pacf(c).has_value();
}

/// Smallest root modulus of 1 - c_1 z - ... - c_m z^m (pass the negated
/// coefficients for an MA polynomial 1 + theta_1 z + ...). Computed from the
/// companion matrix; returns +inf for an empty polynomial.
inline double min_root_modulus(const std::vector<double>& c) {
    std::size_t m = c.size();
    while (m > 0 && std::abs(c[m - 1]) < 1e-10) --m;
    if (m == 0) return std::numeric_limits<double>::infinity();
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<long>(m), static_cast<long>(m));
    for (std::size_t i = 0; i < m; ++i) comp(0, static_cast<long>(i)) = c[i];
    for (std::size_t i = 1; i < m; ++i) comp(static_cast<long>(i), static_cast<long>(i - 1)) = 1.0;
    const Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    double min_mod = std::numeric_limits<double>::infinity();
    for (long i = 0; i < es.eigenvalues().size(); ++i) {
        const double inv_root = std::abs(es.eigenvalues()(i));
        if (inv_root > 1e-12) min_mod = std::min(min_mod, 1.0 / inv_root);
    }
    return min_mod;
}

namespace detail {

inline void require_valid(const ArimaParams& params) {
    if (!ar_is_stationary(params.ar))
        throw ParameterDomainError("arima: AR polynomial has a root on or inside the unit circle");
    if (!ma_is_invertible(params.ma))
        throw ParameterDomainError("arima: MA polynomial has a root on or inside the unit circle");
    if (!(params.sigma2 > 0.0)) throw ParameterDomainError("arima: sigma2 must be positive");
}

/// Gaussian innovations decomposition of a zero-mean ARMA series via the
/// Kalman filter in the Harvey state-space form, with the exact stationary
/// initial state covariance. Runs with unit innovation variance, so
///   loglik(sigma2) = -0.5 * (n log(2 pi sigma2) + sumlog + ssq / sigma2).
struct FilterStats {
    double sumlog = 0.0;
    double ssq = 0.0;
    std::size_t n = 0;
};

inline FilterStats innovations_filter(const std::vector<double>& z, const std::vector<double>& ar,
                                      const std::vector<double>& ma) {
    const int p = static_cast<int>(ar.size());
    const int q = static_cast<int>(ma.size());
    const int r = std::max(p, q + 1);

    Eigen::VectorXd phi = Eigen::VectorXd::Zero(r);
    for (int i = 0; i < p; ++i) phi(i) = ar[static_cast<std::size_t>(i)];
    Eigen::VectorXd rv = Eigen::VectorXd::Zero(r);
    rv(0) = 1.0;
    for (int j = 0; j < q; ++j) rv(j + 1) = ma[static_cast<std::size_t>(j)];

    Eigen::MatrixXd tmat = Eigen::MatrixXd::Zero(r, r);
    for (int i = 0; i < r; ++i) {
        tmat(i, 0) = phi(i);
        if (i + 1 < r) tmat(i, i + 1) = 1.0;
    }
    const Eigen::MatrixXd rrt = rv * rv.transpose();

    // Stationary covariance: vec(P) = (I - T (x) T)^{-1} vec(R R').
    Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(r * r, r * r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            for (int k = 0; k < r; ++k)
                for (int l = 0; l < r; ++l)
                    kron(i * r + j, k * r + l) = tmat(i, k) * tmat(j, l);
    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(r * r, r * r) - kron;
    Eigen::Map<const Eigen::VectorXd> rrt_vec(rrt.data(), r * r);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
    const Eigen::VectorXd p_vec = lu.solve(rrt_vec);
    if (!p_vec.allFinite())
        throw ParameterDomainError("arima: stationary covariance solve failed");
    Eigen::MatrixXd pmat = Eigen::Map<const Eigen::MatrixXd>(p_vec.data(), r, r);
    pmat = 0.5 * (pmat + pmat.transpose()).eval();

    Eigen::VectorXd a = Eigen::VectorXd::Zero(r);
    Eigen::VectorXd gain = Eigen::VectorXd::Zero(r);
    Eigen::VectorXd ta(r), tw(r);
    double f = 0.0;
    bool steady = false;

    FilterStats stats;
    stats.n = z.size();
    for (std::size_t t = 0; t < z.size(); ++t) {
        if (!steady) {
            f = pmat(0, 0);
            if (!(f > 0.0) || !std::isfinite(f))
                throw ParameterDomainError("arima: invalid innovation variance in filter");
            // gain = T P e0 / F
            for (int i = 0; i < r; ++i) {
                tw(i) = phi(i) * pmat(0, 0) + (i + 1 < r ? pmat(i + 1, 0) : 0.0);
                gain(i) = tw(i) / f;
            }
            // P <- T P T' + R R' - (T P e0)(T P e0)' / F
            Eigen::MatrixXd b(r, r);
            for (int i = 0; i < r; ++i) {
                b.row(i) = phi(i) * pmat.row(0);
                if (i + 1 < r) b.row(i) += pmat.row(i + 1);
            }
            Eigen::MatrixXd newp(r, r);
            for (int j = 0; j < r; ++j) {
                newp.col(j) = phi(j) * b.col(0);
                if (j + 1 < r) newp.col(j) += b.col(j + 1);
            }
            newp += rrt;
            newp -= (tw * tw.transpose()) / f;
            if ((newp - pmat).lpNorm<Eigen::Infinity>() < 1e-13 * (1.0 + pmat.lpNorm<Eigen::Infinity>()))
                steady = true;
            pmat = newp;
        }
        const double v = z[t] - a(0);
        stats.ssq += v * v / f;
        stats.sumlog += std::log(f);
        for (int i = 0; i < r; ++i) ta(i) = phi(i) * a(0) + (i + 1 < r ? a(i + 1) : 0.0);
        a = ta + gain * v;
    }
    return stats;
}

constexpr double kPenalty = 1e10;

/// Negative concentrated log-likelihood over the unconstrained
/// parameterization [u_ar, u_ma, (mu)]. tanh maps each coordinate into a
/// partial autocorrelation.
struct ConcentratedObjective {
    const std::vector<double>* w;
    int p;
    int q;
    bool with_mean;

    static std::vector<double> to_pacs(const Eigen::VectorXd& u, int offset, int count) {
        std::vector<double> pac(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            double v = std::tanh(u(offset + i));
            v = std::clamp(v, -1.0 + 1e-10, 1.0 - 1e-10);
            pac[static_cast<std::size_t>(i)] = v;
        }
        return pac;
    }

    void decode(const Eigen::VectorXd& u, std::vector<double>& ar, std::vector<double>& ma,
                double& mu) const {
        ar = pacf_to_coeffs(to_pacs(u, 0, p));
        const auto c = pacf_to_coeffs(to_pacs(u, p, q));
        ma.resize(c.size());
        for (std::size_t j = 0; j < c.size(); ++j) ma[j] = -c[j];
        mu = with_mean ? u(p + q) : 0.0;
    }

    double operator()(const Eigen::VectorXd& u) const {
        std::vector<double> ar, ma;
        double mu = 0.0;
        decode(u, ar, ma, mu);
        std::vector<double> z(*w);
        if (mu != 0.0)
            for (double& v : z) v -= mu;
        try {
            const FilterStats st = innovations_filter(z, ar, ma);
            const double n = static_cast<double>(st.n);
            const double s2 = st.ssq / n;
            if (!(s2 > 0.0) || !std::isfinite(s2)) return kPenalty;
            const double nll =
                0.5 * (n * (std::log(2.0 * M_PI) + 1.0) + n * std::log(s2) + st.sumlog);
            return std::isfinite(nll) ? nll : kPenalty;
        } catch (const ParameterDomainError&) {
            return kPenalty;
        }
    }
};

/// Hannan-Rissanen style starting values: a long autoregression supplies
/// residuals, then one least-squares pass gives preliminary ARMA
/// coefficients. Returns nullopt when the construction is unusable.
inline std::optional<Eigen::VectorXd> hannan_rissanen_start(const std::vector<double>& w, int p,
                                                            int q, bool with_mean) {
    const int n = static_cast<int>(w.size());
    const int m = std::min(std::max(20, p + q + 5), n / 4);
    if (m < p + q + 1 || n < 4 * (p + q + 2)) return std::nullopt;

    const double mu = with_mean ? mean_of(w) : 0.0;
    std::vector<double> z(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) z[i] = w[i] - mu;

    // Long AR by Levinson on the biased autocorrelations.
    std::vector<double> gamma(static_cast<std::size_t>(m) + 1, 0.0);
    for (int k = 0; k <= m; ++k) {
        double acc = 0.0;
        for (int t = k; t < n; ++t) acc += z[static_cast<std::size_t>(t)] * z[static_cast<std::size_t>(t - k)];
        gamma[static_cast<std::size_t>(k)] = acc / n;
    }
    if (!(gamma[0] > 0.0)) return std::nullopt;
    std::vector<double> pac(static_cast<std::size_t>(m));
    std::vector<double> acoef;
    {
        std::vector<double> rho(gamma.size());
        for (std::size_t k = 0; k < gamma.size(); ++k) rho[k] = gamma[k] / gamma[0];
        std::vector<double> prev;
        for (int k = 1; k <= m; ++k) {
            double num = rho[static_cast<std::size_t>(k)];
            double den = 1.0;
            for (int j = 1; j < k; ++j) {
                num -= prev[static_cast<std::size_t>(j - 1)] * rho[static_cast<std::size_t>(k - j)];
                den -= prev[static_cast<std::size_t>(j - 1)] * rho[static_cast<std::size_t>(j)];
            }
            const double pk = den != 0.0 ? num / den : 0.0;
            pac[static_cast<std::size_t>(k - 1)] = std::clamp(pk, -0.98, 0.98);
            std::vector<double> cur(static_cast<std::size_t>(k));
            cur[static_cast<std::size_t>(k - 1)] = pac[static_cast<std::size_t>(k - 1)];
            for (int j = 0; j < k - 1; ++j)
                cur[static_cast<std::size_t>(j)] =
                    prev[static_cast<std::size_t>(j)] -
                    pac[static_cast<std::size_t>(k - 1)] * prev[static_cast<std::size_t>(k - 2 - j)];
            prev = cur;
        }
        acoef = prev;
    }

    std::vector<double> resid(z.size(), 0.0);
    for (int t = m; t < n; ++t) {
        double pred = 0.0;
        for (int i = 1; i <= m; ++i)
            pred += acoef[static_cast<std::size_t>(i - 1)] * z[static_cast<std::size_t>(t - i)];
        resid[static_cast<std::size_t>(t)] = z[static_cast<std::size_t>(t)] - pred;
    }

    const int first = m + std::max(p, q);
    const int rows = n - first;
    if (rows < p + q + 5) return std::nullopt;
    Eigen::MatrixXd x(rows, p + q);
    Eigen::VectorXd y(rows);
    for (int t = first; t < n; ++t) {
        const int row = t - first;
        y(row) = z[static_cast<std::size_t>(t)];
        for (int i = 1; i <= p; ++i) x(row, i - 1) = z[static_cast<std::size_t>(t - i)];
        for (int j = 1; j <= q; ++j) x(row, p + j - 1) = resid[static_cast<std::size_t>(t - j)];
    }
    Eigen::VectorXd beta;
    if (p + q > 0) {
        beta = x.colPivHouseholderQr().solve(y);
        if (!beta.allFinite()) return std::nullopt;
    }

    std::vector<double> ar(static_cast<std::size_t>(p)), ma_neg(static_cast<std::size_t>(q));
    for (int i = 0; i < p; ++i) ar[static_cast<std::size_t>(i)] = beta(i);
    for (int j = 0; j < q; ++j) ma_neg[static_cast<std::size_t>(j)] = -beta(p + j);

    auto to_u = [](const std::vector<double>& coeffs) -> std::optional<std::vector<double>> {
        auto pacs = coeffs_to_pacf(coeffs);
        if (!pacs) return std::nullopt;
        for (double& v : *pacs) v = std::atanh(std::clamp(v, -0.95, 0.95));
        return pacs;
    };
    auto u_ar = to_u(ar);
    auto u_ma = to_u(ma_neg);
    if (!u_ar || !u_ma) return std::nullopt;

    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(p + q + (with_mean ? 1 : 0));
    for (int i = 0; i < p; ++i) u0(i) = (*u_ar)[static_cast<std::size_t>(i)];
    for (int j = 0; j < q; ++j) u0(p + j) = (*u_ma)[static_cast<std::size_t>(j)];
    if (with_mean) u0(p + q) = mu;
    return u0;
}

}  // namespace detail

/// Exact Gaussian log-likelihood of an ARIMA model at the given parameters.
/// The series is differenced d times, the intercept is removed, and the
/// ARMA(p,q) innovations decomposition is evaluated at params.sigma2.
inline double log_likelihood(const ArimaOrder& order, const ArimaParams& params,
                             const TimeSeries& s) {
    if (static_cast<int>(params.ar.size()) != order.p || static_cast<int>(params.ma.size()) != order.q)
        throw Error("log_likelihood: coefficient counts do not match the order");
    detail::require_valid(params);
    const TimeSeries w = difference(s, static_cast<std::size_t>(order.d));
    std::vector<double> z(w.values());
    for (double& v : z) v -= params.intercept;
    const auto st = detail::innovations_filter(z, params.ar, params.ma);
    const double n = static_cast<double>(st.n);
    return -0.5 * (n * std::log(2.0 * M_PI * params.sigma2) + st.sumlog + st.ssq / params.sigma2);
}

/// Maximum-likelihood ARIMA fit. The optimizer works on an unconstrained
/// parameterization (partial autocorrelations through tanh), so every
/// visited point is stationary and invertible; a simplex search is followed
/// by a quasi-Newton polish. No intercept is fitted when d >= 1.
inline ArimaFit fit(const TimeSeries& s, const ArimaOrder& order) {
    if (order.p < 0 || order.d < 0 || order.q < 0) throw Error("fit: negative order");
    const std::size_t min_len = 10 * static_cast<std::size_t>(order.p + order.q + 1);
    if (s.size() < min_len)
        throw InsufficientData("fit: need at least " + std::to_string(min_len) + " observations");

    const TimeSeries wts = difference(s, static_cast<std::size_t>(order.d));
    const std::vector<double>& w = wts.values();
    const bool with_mean = order.d == 0;
    const int dim = order.p + order.q + (with_mean ? 1 : 0);

    detail::ConcentratedObjective obj{&w, order.p, order.q, with_mean};

    Eigen::VectorXd start = Eigen::VectorXd::Zero(dim);
    if (with_mean) start(order.p + order.q) = mean_of(w);
    if (const auto hr = detail::hannan_rissanen_start(w, order.p, order.q, with_mean)) {
        if (obj(*hr) < obj(start)) start = *hr;
    }

    optim::Result nm{start, obj(start), dim == 0, 0};
    optim::Result polish = nm;
    if (dim > 0) {
        nm = optim::nelder_mead(obj, start, 500, 1e-8);
        polish = optim::bfgs(obj, nm.x, 100, 1e-3);
        if (polish.fx > nm.fx) polish = nm;
    }

    ArimaFit out;
    out.order = order;
    out.iterations = nm.iterations + polish.iterations;
    out.converged = (nm.converged || polish.converged) && polish.fx < detail::kPenalty;

    double mu = 0.0;
    obj.decode(polish.x, out.ar_coefficients, out.ma_coefficients, mu);
    out.intercept = mu;

    std::vector<double> z(w);
    if (mu != 0.0)
        for (double& v : z) v -= mu;
    const auto st = detail::innovations_filter(z, out.ar_coefficients, out.ma_coefficients);
    const double n = static_cast<double>(st.n);
    out.sigma2 = st.ssq / n;
    out.log_likelihood =
        -0.5 * (n * (std::log(2.0 * M_PI) + 1.0) + n * std::log(out.sigma2) + st.sumlog);
    const double k = static_cast<double>(order.p + order.q + 1 + 1);
    out.aicc = -2.0 * out.log_likelihood + 2.0 * k * n / (n - k - 1.0);
    return out;
}

/// Automatic order selection: d is the smallest number of differences after
/// which the ADF test rejects a unit root at 5% (capped at max_d), then a
/// stepwise neighborhood search over (p,q) minimizes AICc from the seeds
/// (0,0), (1,0), (0,1), (2,2).
inline ArimaOrder auto_order(const TimeSeries& s, int max_p = 5, int max_q = 5, int max_d = 2) {
    if (s.size() < 100) throw InsufficientData("auto_order: need at least 100 observations");

    int d = 0;
    {
        TimeSeries cur = s;
        while (d < max_d) {
            if (unit_root::adf_test(cur).p_value < 0.05) break;
            cur = difference(cur, 1);
            ++d;
        }
    }

    std::map<std::pair<int, int>, double> evaluated;
    auto eval = [&](int p, int q) -> double {
        if (p < 0 || q < 0 || p > max_p || q > max_q)
            return std::numeric_limits<double>::infinity();
        const auto key = std::make_pair(p, q);
        if (const auto it = evaluated.find(key); it != evaluated.end()) return it->second;
        double aicc = std::numeric_limits<double>::infinity();
        try {
            const ArimaFit f = fit(s, ArimaOrder{p, d, q});
            // Admissibility guard: near-unit or near-cancelling roots mean the
            // extra parameters carry no real structure.
            std::vector<double> ma_neg(f.ma_coefficients.size());
            for (std::size_t j = 0; j < ma_neg.size(); ++j) ma_neg[j] = -f.ma_coefficients[j];
            const bool admissible = min_root_modulus(f.ar_coefficients) > 1.05 &&
                                    min_root_modulus(ma_neg) > 1.05;
            if (f.converged && admissible && std::isfinite(f.aicc)) aicc = f.aicc;
        } catch (const Error&) {
            // unusable candidate; leave at +inf
        }
        evaluated[key] = aicc;
        return aicc;
    };

    std::pair<int, int> best{0, 0};
    double best_aicc = std::numeric_limits<double>::infinity();
    for (const auto& seed : {std::pair<int, int>{0, 0}, {1, 0}, {0, 1}, {2, 2}}) {
        const double a = eval(seed.first, seed.second);
        if (a < best_aicc) {
            best_aicc = a;
            best = seed;
        }
    }

    bool improved = true;
    while (improved) {
        improved = false;
        const auto [p, q] = best;
        for (const auto& cand :
             {std::pair<int, int>{p + 1, q}, {p - 1, q}, {p, q + 1}, {p, q - 1}}) {
            const double a = eval(cand.first, cand.second);
            if (a < best_aicc) {
                best_aicc = a;
                best = cand;
                improved = true;
            }
        }
    }

    if (!std::isfinite(best_aicc)) throw SearchFailed("auto_order: every candidate model failed");
    return ArimaOrder{best.first, d, best.second};
}

/// Simulates an ARIMA path. Deterministic for a fixed seed: Gaussian
/// innovations from a seeded Mersenne Twister, a burn-in of 10(p+q+1) draws
/// discarded, and d cumulative summations applied last.
inline TimeSeries simulate(const ArimaOrder& order, const ArimaParams& params, std::size_t n,
                           std::uint64_t seed) {
    if (n == 0) throw Error("simulate: n must be positive");
    if (static_cast<int>(params.ar.size()) != order.p || static_cast<int>(params.ma.size()) != order.q)
        throw Error("simulate: coefficient counts do not match the order");
    detail::require_valid(params);

    const std::size_t p = params.ar.size();
    const std::size_t q = params.ma.size();
    const std::size_t burn = 10 * (p + q + 1);
    const std::size_t total = n + burn;

    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, std::sqrt(params.sigma2));

    std::vector<double> eps(total), w(total);
    for (std::size_t t = 0; t < total; ++t) {
        eps[t] = noise(gen);
        double v = eps[t];
        for (std::size_t i = 1; i <= p && i <= t; ++i) v += params.ar[i - 1] * w[t - i];
        for (std::size_t j = 1; j <= q && j <= t; ++j) v += params.ma[j - 1] * eps[t - j];
        w[t] = v;
    }

    std::vector<double> z(w.begin() + static_cast<long>(burn), w.end());
    for (double& v : z) v += params.intercept;
    for (int k = 0; k < order.d; ++k) z = cumulative_sum(z);

    return TimeSeries::with_default_dates(
        "sim" + order.to_string() + "#" + std::to_string(seed), std::move(z));
}

}  // namespace tsecon::arima
