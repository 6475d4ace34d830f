#include "hri/optimize.hpp"

#include <cmath>

namespace hri {

AscentResult maximize_bfgs(const Objective& f, Eigen::VectorXd x, const AscentOptions& opts) {
    const Eigen::Index n = x.size();
    Eigen::VectorXd g(n);
    double fx = f(x, &g);
    Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n);
    AscentResult res{x, fx, 0, false};
    if (!std::isfinite(fx)) return res;

    Eigen::VectorXd g_new(n);
    for (int it = 0; it < opts.max_iterations; ++it) {
        res.iterations = it;
        if (g.norm() < opts.gradient_tolerance) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd dir = Hinv * g;
        double slope = g.dot(dir);
        if (!(slope > 0.0)) {
            Hinv.setIdentity();
            dir = g;
            slope = g.squaredNorm();
        }
        double step = 1.0;
        bool accepted = false;
        Eigen::VectorXd x_new;
        double f_new = 0.0;
        for (int k = 0; k < opts.max_backtracks; ++k) {
            x_new = x + step * dir;
            f_new = f(x_new, &g_new);
            if (std::isfinite(f_new) && f_new >= fx + opts.armijo * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // No ascent along the quasi-Newton direction; a plain gradient
            // step is tried once before giving up.
            if (Hinv.isIdentity()) break;
            Hinv.setIdentity();
            continue;
        }
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g - g_new;  // ascent: curvature of -f
        const double sy = s.dot(y);
        if (sy > 1e-12) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
            Hinv = (I - rho * s * y.transpose()) * Hinv * (I - rho * y * s.transpose()) + rho * s * s.transpose();
        }
        x = x_new;
        fx = f_new;
        g = g_new;
        res.x = x;
        res.value = fx;
        res.iterations = it + 1;
    }
    if (g.norm() < opts.gradient_tolerance) res.converged = true;
    return res;
}

Eigen::VectorXd finite_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                           const Eigen::VectorXd& x, double h) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        xp[i] = xi + h;
        const double fp = f(xp);
        xp[i] = xi - h;
        const double fm = f(xp);
        xp[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

}  // namespace hri
