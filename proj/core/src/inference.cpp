#include "hri/inference.hpp"

#include <cmath>
#include <string>

#include "hri/errors.hpp"
#include "hri/numeric.hpp"

namespace hri {

void ParameterSet::validate(Eigen::Index feature_dim) const {
    if (candidates.empty()) throw ConfigError("parameter set is empty", "theta");
    if (!labels.empty() && labels.size() != candidates.size()) {
        throw ConfigError("one label per candidate is required", "theta/labels");
    }
    const Eigen::Index dim = feature_dim >= 0 ? feature_dim : candidates.front().size();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].size() != dim) {
            throw ConfigError("candidate dimension " + std::to_string(candidates[i].size()) +
                                  " does not match feature dimension " + std::to_string(dim),
                              "theta/" + std::to_string(i));
        }
    }
}

Belief::Belief(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) throw ArgumentError("belief must be non-empty");
    double s = 0.0;
    for (double v : p_) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ArgumentError("belief entries must be finite and >= 0");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) throw ArgumentError("belief must sum to 1, got " + std::to_string(s));
}

Belief Belief::uniform(std::size_t n) {
    if (n == 0) throw ArgumentError("belief must be non-empty");
    return Belief(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Belief Belief::degenerate(std::size_t n, std::size_t index) {
    if (index >= n) throw ArgumentError("degenerate belief index out of range");
    std::vector<double> p(n, 0.0);
    p[index] = 1.0;
    return Belief(std::move(p));
}

std::size_t Belief::map_index() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p_.size(); ++i) {
        if (p_[i] > p_[best]) best = i;
    }
    return best;
}

Belief belief_update(const Belief& b, std::span<const double> log_lik) {
    if (log_lik.size() != b.size()) throw ArgumentError("likelihood vector is not aligned with the belief");
    std::vector<double> lp(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (std::isnan(log_lik[i]) || log_lik[i] == std::numeric_limits<double>::infinity()) {
            throw ArgumentError("log-likelihood must be finite or -inf");
        }
        lp[i] = b[i] > 0.0 ? std::log(b[i]) + log_lik[i] : kNegInf;
    }
    if (logsumexp(lp) == kNegInf) throw InconsistentEvidence("evidence has zero likelihood under every hypothesis");
    std::vector<double> post = softmax(lp);
    return Belief(std::move(post));
}

double entropy(const Belief& b) {
    double h = 0.0;
    for (double p : b.probabilities()) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

double expected_posterior_entropy(const Belief& b, const std::vector<std::vector<double>>& log_lik) {
    if (log_lik.size() != b.size()) throw ArgumentError("likelihood table is not aligned with the belief");
    const std::size_t m = log_lik.front().size();
    for (const auto& row : log_lik) {
        if (row.size() != m) throw ArgumentError("likelihood table rows differ in length");
    }
    // Outer sum over responses j: P(j) H(b'|j), P(j) = sum_theta b(theta) P(j|theta).
    double total = 0.0;
    std::vector<double> col(b.size());
    for (std::size_t j = 0; j < m; ++j) {
        double pj = 0.0;
        for (std::size_t t = 0; t < b.size(); ++t) {
            col[t] = log_lik[t][j];
            pj += b[t] * std::exp(log_lik[t][j]);
        }
        if (pj <= 0.0) continue;
        total += pj * entropy(belief_update(b, col));
    }
    return total;
}

double laplace_goal_log_likelihood(const GoalWalk& walk, Cell start, std::span<const Move> prefix, Cell goal) {
    Cell c = start;
    bool reached = c == goal;
    int cost_steps = 0;
    for (Move m : prefix) {
        if (reached) {
            if (m != Move::stay) return kNegInf;
            continue;
        }
        c = apply_move(c, m, walk.width, walk.height);
        ++cost_steps;
        if (c == goal) reached = true;
    }
    const int remaining = walk.horizon - static_cast<int>(prefix.size());
    if (remaining < 0) throw ArgumentError("prefix longer than the horizon");
    const int d0 = manhattan(start, goal);
    if (d0 > walk.horizon) return kNegInf;
    const int d = manhattan(c, goal);
    if (d > remaining) return kNegInf;
    return walk.beta * (-static_cast<double>(cost_steps) - d + d0);
}

double laplace_goal_log_likelihood(const GoalWalk& walk, Cell start, int steps, Cell current, Cell goal) {
    const int remaining = walk.horizon - steps;
    if (remaining < 0) throw ArgumentError("prefix longer than the horizon");
    const int d0 = manhattan(start, goal);
    if (d0 > walk.horizon) return kNegInf;
    const int d = manhattan(current, goal);
    if (d > remaining) return kNegInf;
    return walk.beta * (-static_cast<double>(steps) - d + d0);
}

}  // namespace hri
