#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace tsecon::optim {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct Result {
    Eigen::VectorXd x;
    double fx = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iterations = 0;
};

/// Derivative-free simplex minimization (Nelder-Mead with the standard
/// reflection/expansion/contraction coefficients).
inline Result nelder_mead(const Objective& f, const Eigen::VectorXd& x0, int max_iter = 500,
                          double x_tol = 1e-8, double f_tol = 1e-10) {
    const int n = static_cast<int>(x0.size());
    Result res;
    if (n == 0) {
        res.x = x0;
        res.fx = f(x0);
        res.converged = true;
        return res;
    }

    std::vector<Eigen::VectorXd> pts(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (int i = 0; i < n; ++i) pts[i + 1](i) += (x0(i) != 0.0 ? 0.1 * std::abs(x0(i)) + 0.05 : 0.1);
    for (int i = 0; i <= n; ++i) fv[i] = f(pts[i]);

    auto order = [&] {
        for (int i = 1; i <= n; ++i) {
            for (int j = i; j > 0 && fv[j] < fv[j - 1]; --j) {
                std::swap(fv[j], fv[j - 1]);
                std::swap(pts[j], pts[j - 1]);
            }
        }
    };
    order();

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        double spread = 0.0;
        for (int i = 1; i <= n; ++i) spread = std::max(spread, (pts[i] - pts[0]).lpNorm<Eigen::Infinity>());
        if (spread < x_tol && std::abs(fv[n] - fv[0]) < f_tol * (1.0 + std::abs(fv[0]))) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) centroid += pts[i];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd refl = centroid + (centroid - pts[n]);
        const double f_refl = f(refl);
        if (f_refl < fv[0]) {
            const Eigen::VectorXd expa = centroid + 2.0 * (centroid - pts[n]);
            const double f_expa = f(expa);
            if (f_expa < f_refl) {
                pts[n] = expa;
                fv[n] = f_expa;
            } else {
                pts[n] = refl;
                fv[n] = f_refl;
            }
        } else if (f_refl < fv[n - 1]) {
            pts[n] = refl;
            fv[n] = f_refl;
        } else {
            const bool outside = f_refl < fv[n];
            Eigen::VectorXd contr;
            if (outside) contr = centroid + 0.5 * (refl - centroid);
            else contr = centroid - 0.5 * (centroid - pts[n]);
            const double f_contr = f(contr);
            if (f_contr < std::min(f_refl, fv[n])) {
                pts[n] = contr;
                fv[n] = f_contr;
            } else {
                for (int i = 1; i <= n; ++i) {
                    pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
                    fv[i] = f(pts[i]);
                }
            }
        }
        order();
    }
    res.x = pts[0];
    res.fx = fv[0];
    res.iterations = iter;
    return res;
}

/// Central-difference gradient with per-component step scaling.
inline Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x,
                                        double rel_step = 1e-4) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (int i = 0; i < x.size(); ++i) {
        const double h = rel_step * (1.0 + std::abs(x(i)));
        xp(i) = x(i) + h;
        const double fp = f(xp);
        xp(i) = x(i) - h;
        const double fm = f(xp);
        xp(i) = x(i);
        g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// Quasi-Newton (BFGS) polish with numerical gradients and a backtracking
/// Armijo line search. Intended to refine a simplex solution, not to work
/// from arbitrary starting points.
inline Result bfgs(const Objective& f, const Eigen::VectorXd& x0, int max_iter = 100,
                   double grad_tol = 1e-3) {
    const int n = static_cast<int>(x0.size());
    Result res;
    res.x = x0;
    res.fx = f(x0);
    if (n == 0) {
        res.converged = true;
        return res;
    }

    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd g = numeric_gradient(f, res.x);
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        if (g.norm() < grad_tol) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd dir = -h_inv * g;
        if (dir.dot(g) >= 0.0) {  // reset on loss of descent direction
            h_inv.setIdentity();
            dir = -g;
        }

        double step = 1.0;
        double f_new = std::numeric_limits<double>::infinity();
        Eigen::VectorXd x_new;
        const double slope = g.dot(dir);
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls) {
            x_new = res.x + step * dir;
            f_new = f(x_new);
            if (std::isfinite(f_new) && f_new <= res.fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        const Eigen::VectorXd g_new = numeric_gradient(f, x_new);
        const Eigen::VectorXd s = x_new - res.x;
        const Eigen::VectorXd yv = g_new - g;
        const double sy = s.dot(yv);
        if (sy > 1e-12) {
            const Eigen::VectorXd hy = h_inv * yv;
            const double yhy = yv.dot(hy);
            h_inv += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
                     (hy * s.transpose() + s * hy.transpose()) / sy;
        }
        res.x = x_new;
        res.fx = f_new;
        g = g_new;
    }
    if (g.norm() < grad_tol) res.converged = true;
    res.iterations = iter;
    return res;
}

}  // namespace tsecon::optim
