#pragma once

// Expert and teaching demonstrations in enumerable discrete domains. The
// observer updates a belief over Theta from a full human trajectory with the
// Boltzmann model over every sequence of the horizon's length.

#include <cmath>
#include <vector>

#include "hri/human_models.hpp"
#include "hri/inference.hpp"

namespace hri {

template <DiscreteGame D>
struct DemonstrationSet {
    std::vector<ControlSequence<typename D::Control>> candidates;  // lexicographic
    std::vector<FeatureVector> features;                           // summed over the horizon
};

template <DiscreteGame D>
DemonstrationSet<D> enumerate_demonstrations(const D& dyn, const typename D::State& x0,
                                             const ControlSequence<typename D::Control>& u_r,
                                             const typename D::FeatureParams& params = {}) {
    DemonstrationSet<D> set;
    set.candidates = enumerate_sequences(dyn, Agent::human, static_cast<int>(u_r.size()));
    set.features.reserve(set.candidates.size());
    for (const auto& u_h : set.candidates) {
        FeatureVector phi = FeatureVector::Zero(dyn.feature_dim());
        typename D::State x = x0;
        for (std::size_t t = 0; t < u_r.size(); ++t) {
            phi += dyn.features(x, u_r[t], u_h[t], params, Agent::human);
            x = dyn.step(x, u_r[t], u_h[t]);
        }
        set.features.push_back(std::move(phi));
    }
    return set;
}

// Posterior b'(theta) after observing candidate `index` under prior `prior`.
template <DiscreteGame D>
Belief demonstration_posterior(const DemonstrationSet<D>& set, std::size_t index, const ParameterSet& thetas,
                               const Belief& prior, double beta) {
    if (index >= set.candidates.size()) throw ArgumentError("demonstration index out of range");
    if (thetas.size() != prior.size()) throw ArgumentError("prior is not aligned with the parameter set");
    std::vector<double> ll;
    ll.reserve(thetas.size());
    for (const auto& theta : thetas.candidates) {
        std::vector<double> r;
        r.reserve(set.features.size());
        for (const auto& phi : set.features) r.push_back(theta.dot(phi));
        ll.push_back(boltzmann_log_likelihood(r, index, beta));
    }
    return belief_update(prior, ll);
}

// argmax R(u_H; theta*), ties toward the lexicographically first sequence.
template <DiscreteGame D>
std::size_t expert_demo(const DemonstrationSet<D>& set, const Eigen::VectorXd& theta_star) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < set.features.size(); ++i) {
        if (theta_star.dot(set.features[i]) > theta_star.dot(set.features[best])) best = i;
    }
    return best;
}

// argmax b'(theta*) over every demonstration; ties (within 1e-12) toward the
// higher reward under theta*, then the lexicographically first sequence.
template <DiscreteGame D>
std::size_t teacher_demo(const DemonstrationSet<D>& set, const ParameterSet& thetas, std::size_t star,
                         const Belief& prior, double beta) {
    if (star >= thetas.size()) throw ArgumentError("true parameter index out of range");
    if (thetas.size() != prior.size()) throw ArgumentError("prior is not aligned with the parameter set");
    const std::size_t n = set.features.size(), k = thetas.size();
    // Shared per-theta normalizers; the posterior of each candidate then costs O(k).
    std::vector<double> log_z(k);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = beta * thetas.candidates[j].dot(set.features[i]);
        log_z[j] = logsumexp(r);
    }
    constexpr double kTie = 1e-12;
    std::size_t best = 0;
    double best_post = -1.0, best_reward = 0.0;
    std::vector<double> ll(k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) ll[j] = beta * thetas.candidates[j].dot(set.features[i]) - log_z[j];
        const double post = belief_update(prior, ll)[star];
        const double reward = thetas.candidates[star].dot(set.features[i]);
        if (post > best_post + kTie || (std::abs(post - best_post) <= kTie && reward > best_reward)) {
            best = i;
            best_post = post;
            best_reward = reward;
        }
    }
    return best;
}

}  // namespace hri
