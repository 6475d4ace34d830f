#pragma once

#include <functional>

#include <Eigen/Dense>

namespace hri {

// f(x, grad) returns the objective and writes its gradient when grad != nullptr.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

struct AscentOptions {
    int max_iterations = 100;
    double gradient_tolerance = 1e-6;
    double armijo = 1e-4;
    int max_backtracks = 40;
};

struct AscentResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;  // gradient norm fell below tolerance
};

// BFGS ascent with backtracking Armijo line search. Anytime: on budget
// exhaustion the best iterate is returned with converged = false.
AscentResult maximize_bfgs(const Objective& f, Eigen::VectorXd x0, const AscentOptions& opts = {});

// Central finite-difference gradient.
Eigen::VectorXd finite_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                           const Eigen::VectorXd& x, double h = 1e-5);

}  // namespace hri
