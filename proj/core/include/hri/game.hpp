#pragma once

// Two-player finite-horizon game: shared vocabulary and reward arithmetic.
//
// A domain type D supplies State, Control and FeatureParams together with
// deterministic dynamics and a feature map. Rewards are linear in features:
// r(x, u_R, u_H; theta) = theta . phi(x, u_R, u_H), and the cumulative reward
// of a pair of length-T control sequences is the sum of T step rewards, each
// control pair evaluated at the state it is applied in.

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <string>
#include <vector>

#include "hri/errors.hpp"

namespace hri {

enum class Agent { robot, human };

inline const char* to_string(Agent a) { return a == Agent::robot ? "robot" : "human"; }

struct Horizon {
    int steps = 1;    // T
    double dt = 0.0;  // continuous domains only

    void validate(bool continuous) const {
        if (steps < 1) throw ConfigError("horizon must be >= 1", "horizon");
        if (continuous && !(dt > 0.0)) throw ConfigError("dt must be > 0", "dt");
    }
};

template <class C>
using ControlSequence = std::vector<C>;

using FeatureVector = Eigen::VectorXd;

template <class D>
concept GameDomain = requires(const D& dyn, const typename D::State& x, const typename D::Control& u,
                              const typename D::FeatureParams& params, Agent agent) {
    { dyn.step(x, u, u) } -> std::same_as<typename D::State>;
    { dyn.features(x, u, u, params, agent) } -> std::same_as<FeatureVector>;
    { dyn.feature_dim() } -> std::convertible_to<Eigen::Index>;
    dyn.check_control(u, agent);
    { dyn.horizon() } -> std::convertible_to<Horizon>;
    { D::kContinuous } -> std::convertible_to<bool>;
};

template <class D>
struct RewardModel {
    typename D::FeatureParams params{};
    Eigen::VectorXd weights;
    Agent owner = Agent::robot;
};

template <class D>
RewardModel<D> make_reward(Eigen::VectorXd weights, Agent owner, typename D::FeatureParams params = {}) {
    return RewardModel<D>{std::move(params), std::move(weights), owner};
}

template <GameDomain D>
double step_reward(const D& dyn, const typename D::State& x, const typename D::Control& u_r,
                   const typename D::Control& u_h, const RewardModel<D>& model) {
    const FeatureVector phi = dyn.features(x, u_r, u_h, model.params, model.owner);
    if (phi.size() != model.weights.size()) {
        throw ConfigError("weight dimension " + std::to_string(model.weights.size()) +
                          " does not match feature dimension " + std::to_string(phi.size()), "weights");
    }
    if (!phi.allFinite()) throw DomainError("feature map produced a non-finite value");
    return model.weights.dot(phi);
}

template <GameDomain D>
void check_sequences(const D& dyn, const ControlSequence<typename D::Control>& u_r,
                     const ControlSequence<typename D::Control>& u_h) {
    if (u_r.size() != u_h.size()) {
        throw ArgumentError("control sequence length mismatch: robot " + std::to_string(u_r.size()) +
                            ", human " + std::to_string(u_h.size()));
    }
    if (u_r.empty()) throw ArgumentError("control sequences must have length >= 1");
    for (const auto& u : u_r) dyn.check_control(u, Agent::robot);
    for (const auto& u : u_h) dyn.check_control(u, Agent::human);
}

// T+1 states; element 0 is x0. Out-of-bounds controls are rejected, not clamped.
template <GameDomain D>
std::vector<typename D::State> rollout(const D& dyn, const typename D::State& x0,
                                       const ControlSequence<typename D::Control>& u_r,
                                       const ControlSequence<typename D::Control>& u_h) {
    check_sequences(dyn, u_r, u_h);
    std::vector<typename D::State> states;
    states.reserve(u_r.size() + 1);
    states.push_back(x0);
    for (std::size_t t = 0; t < u_r.size(); ++t) states.push_back(dyn.step(states.back(), u_r[t], u_h[t]));
    return states;
}

// Per-step rewards r(x^t, u_R^t, u_H^t) for t = 0..T-1.
template <GameDomain D>
std::vector<double> step_rewards(const D& dyn, const typename D::State& x0,
                                 const ControlSequence<typename D::Control>& u_r,
                                 const ControlSequence<typename D::Control>& u_h, const RewardModel<D>& model) {
    check_sequences(dyn, u_r, u_h);
    std::vector<double> out;
    out.reserve(u_r.size());
    typename D::State x = x0;
    for (std::size_t t = 0; t < u_r.size(); ++t) {
        out.push_back(step_reward(dyn, x, u_r[t], u_h[t], model));
        x = dyn.step(x, u_r[t], u_h[t]);
    }
    return out;
}

template <GameDomain D>
double cumulative_reward(const D& dyn, const typename D::State& x0,
                         const ControlSequence<typename D::Control>& u_r,
                         const ControlSequence<typename D::Control>& u_h, const RewardModel<D>& model) {
    double total = 0.0;
    for (double r : step_rewards(dyn, x0, u_r, u_h, model)) total += r;
    return total;
}

// dR/d(flattened controls of `wrt`). Continuous domains provide the analytic
// derivative through D::reward_gradient.
template <GameDomain D>
Eigen::VectorXd reward_gradient(const D& dyn, const typename D::State& x0,
                                const ControlSequence<typename D::Control>& u_r,
                                const ControlSequence<typename D::Control>& u_h, const RewardModel<D>& model,
                                Agent wrt) {
    if constexpr (D::kContinuous) {
        check_sequences(dyn, u_r, u_h);
        return dyn.reward_gradient(x0, u_r, u_h, model.params, model.owner, model.weights, wrt);
    } else {
        (void)dyn, (void)x0, (void)u_r, (void)u_h, (void)model, (void)wrt;
        throw UnsupportedOperation("reward_gradient is only defined for continuous domains");
    }
}

}  // namespace hri
