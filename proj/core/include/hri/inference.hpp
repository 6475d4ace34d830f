#pragma once

// Finite-hypothesis Bayesian inference over human (or robot) parameters.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hri/gridworld.hpp"

namespace hri {

// Theta: candidate weight vectors (or goal ids, encoded as 1-vectors) with
// display labels.
struct ParameterSet {
    std::vector<Eigen::VectorXd> candidates;
    std::vector<std::string> labels;

    void validate(Eigen::Index feature_dim = -1) const;
    std::size_t size() const { return candidates.size(); }
};

class Belief {
public:
    Belief() = default;
    explicit Belief(std::vector<double> probabilities);  // validated, not renormalized
    static Belief uniform(std::size_t n);
    static Belief degenerate(std::size_t n, std::size_t index);

    const std::vector<double>& probabilities() const { return p_; }
    double operator[](std::size_t i) const { return p_[i]; }
    std::size_t size() const { return p_.size(); }
    // Highest-probability index; ties toward the lowest index.
    std::size_t map_index() const;

    friend bool operator==(const Belief&, const Belief&) = default;

private:
    std::vector<double> p_;
};

// b'(i) proportional to b(i) exp(log_lik[i]), accumulated in log space.
Belief belief_update(const Belief& b, std::span<const double> log_lik);

double entropy(const Belief& b);  // nats, 0 log 0 := 0

// sum_theta b(theta) sum_j P(j | theta) H(b' | j), where
// log_lik[theta][j] = log P(response j | theta) over a finite response set.
double expected_posterior_entropy(const Belief& b, const std::vector<std::vector<double>>& log_lik);

// Online goal inference for a human walking a 4-connected grid toward one
// of several goal cells (reward -1 per step until the goal is reached, after
// which the human stays put at no cost). The future is integrated out with
// the Laplace point approximation:
//   log P(prefix | g) = beta (R(prefix) + V*(x_t) - V*(x_0))
// with V*(x) = -(Manhattan distance to g), or -inf when g is out of reach in
// the remaining steps. A prefix that leaves a reached goal has likelihood 0.
struct GoalWalk {
    int width = 1;
    int height = 1;
    int horizon = 1;  // steps available from `start`
    double beta = 1.0;
};

double laplace_goal_log_likelihood(const GoalWalk& walk, Cell start, std::span<const Move> prefix, Cell goal);

// Same quantity for a prefix of `steps` moves from `start` that ended at
// `current` without passing through `goal`.
double laplace_goal_log_likelihood(const GoalWalk& walk, Cell start, int steps, Cell current, Cell goal);

}  // namespace hri
