#pragma once

// Human behavior models: myopic and full-horizon best responders, the
// Boltzmann (noisily rational) observation model over a finite candidate
// set, and a goal-directed Boltzmann walker used to simulate gridworld
// collaborators.

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "hri/driving.hpp"
#include "hri/gridworld.hpp"
#include "hri/numeric.hpp"
#include "hri/optimize.hpp"

namespace hri {

enum class HumanKind { perfect_collaborator, myopic, best_response, boltzmann, scripted };

const char* to_string(HumanKind k);
HumanKind parse_human_kind(std::string_view name);

struct HumanModel {
    HumanKind kind = HumanKind::boltzmann;
    Eigen::VectorXd theta_h;
    double beta = 1.0;
    std::uint64_t rng_seed = 0;

    void validate(Eigen::Index feature_dim) const;
};

// ---- Boltzmann over a finite candidate set --------------------------------

// log P(i) = beta R_i - logsumexp_j beta R_j
std::vector<double> boltzmann_log_probabilities(std::span<const double> rewards, double beta);
double boltzmann_log_likelihood(std::span<const double> rewards, std::size_t index, double beta);
std::size_t boltzmann_sample(std::span<const double> rewards, double beta, Rng& rng);

// ---- Discrete domains -----------------------------------------------------

template <class D>
concept DiscreteGame = GameDomain<D> && !D::kContinuous && requires(const D& dyn, Agent a) { dyn.actions(a); };

template <class C>
struct BestResponse {
    ControlSequence<C> controls;
    double value = 0.0;
    bool converged = true;  // false: budget exhausted, best iterate returned
};

inline constexpr std::size_t kMaxEnumeratedSequences = 1'000'000;

// Every control sequence of `length` for `agent`, lexicographic in the
// domain's canonical action order.
template <DiscreteGame D>
std::vector<ControlSequence<typename D::Control>> enumerate_sequences(const D& dyn, Agent agent, int length) {
    using C = typename D::Control;
    const auto acts = dyn.actions(agent);
    const std::size_t k = std::size(acts);
    if (k == 0) throw DomainError("empty action set");
    if (length < 1) throw ArgumentError("sequence length must be >= 1");
    double count = 1.0;
    for (int i = 0; i < length; ++i) count *= static_cast<double>(k);
    if (count > static_cast<double>(kMaxEnumeratedSequences)) {
        throw ConfigError("instance exceeds the exhaustive-search limit of " +
                          std::to_string(kMaxEnumeratedSequences) + " sequences", "horizon");
    }
    std::vector<ControlSequence<C>> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<std::size_t> idx(static_cast<std::size_t>(length), 0);
    while (true) {
        ControlSequence<C> seq;
        seq.reserve(idx.size());
        for (std::size_t i : idx) seq.push_back(acts[i]);
        out.push_back(std::move(seq));
        int pos = length - 1;
        while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == k) idx[static_cast<std::size_t>(pos--)] = 0;
        if (pos < 0) break;
    }
    return out;
}

// Cumulative reward of each candidate sequence for `varying`, the other
// agent's sequence held fixed.
template <GameDomain D>
std::vector<double> candidate_rewards(const D& dyn, const typename D::State& x0,
                                      const ControlSequence<typename D::Control>& fixed,
                                      const std::vector<ControlSequence<typename D::Control>>& candidates,
                                      const RewardModel<D>& model, Agent varying) {
    if (candidates.empty()) throw ArgumentError("candidate set is empty");
    std::vector<double> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) {
        out.push_back(varying == Agent::human ? cumulative_reward(dyn, x0, fixed, c, model)
                                              : cumulative_reward(dyn, x0, c, fixed, model));
    }
    return out;
}

// Exact argmax_{u_H} R_H(x0, u_R, u_H); ties toward the lexicographically
// first sequence.
template <DiscreteGame D>
BestResponse<typename D::Control> trajectory_best_response(const D& dyn, const typename D::State& x0,
                                                           const ControlSequence<typename D::Control>& u_r,
                                                           const RewardModel<D>& model_h) {
    const auto cands = enumerate_sequences(dyn, Agent::human, static_cast<int>(u_r.size()));
    const auto rewards = candidate_rewards(dyn, x0, u_r, cands, model_h, Agent::human);
    std::size_t best = 0;
    for (std::size_t i = 1; i < rewards.size(); ++i) {
        if (rewards[i] > rewards[best]) best = i;
    }
    return {cands[best], rewards[best], true};
}

// argmax_{u_H} r(x, u_R, u_H); ties toward the earliest canonical action.
template <DiscreteGame D>
typename D::Control myopic_response(const D& dyn, const typename D::State& x, const typename D::Control& u_r,
                                    const RewardModel<D>& model) {
    const auto acts = dyn.actions(Agent::human);
    if (std::size(acts) == 0) throw DomainError("empty action set");
    auto best = acts[0];
    double best_r = step_reward(dyn, x, u_r, best, model);
    for (std::size_t i = 1; i < std::size(acts); ++i) {
        const double r = step_reward(dyn, x, u_r, acts[i], model);
        if (r > best_r) {
            best_r = r;
            best = acts[i];
        }
    }
    return best;
}

// ---- Continuous (driving) -------------------------------------------------

struct ContinuousOptions {
    int pieces = 4;  // piecewise-constant control segments over the horizon
    int starts = 8;  // multi-start count K
    AscentOptions ascent{};
    std::uint64_t seed = 0;
};

// Box-constrained piecewise-constant control parameterization:
// u = center + half_range * tanh(z), one (steer, accel) pair per piece.
class PiecewiseControls {
public:
    PiecewiseControls(const ControlBounds& bounds, int steps, int pieces);

    int steps() const { return steps_; }
    int pieces() const { return pieces_; }
    Eigen::Index dim() const { return 2 * pieces_; }
    int piece_of(int t) const { return t * pieces_ / steps_; }

    ControlSequence<CarControl> decode(const Eigen::VectorXd& z) const;
    // Chain rule: gradient w.r.t. flattened controls -> gradient w.r.t. z.
    Eigen::VectorXd pull_back(const Eigen::VectorXd& z, const Eigen::VectorXd& grad_u) const;
    // Per-piece average of u, mapped back through atanh (clipped inside the box).
    Eigen::VectorXd encode(const ControlSequence<CarControl>& u) const;
    Eigen::VectorXd zero() const { return encode(ControlSequence<CarControl>(static_cast<std::size_t>(steps_))); }

private:
    ControlBounds bounds_;
    int steps_;
    int pieces_;
};

// Best response of the human driver by multi-start quasi-Newton ascent. Start
// order: zero controls, the warm start (if any), hard braking, full throttle,
// then seeded random starts up to `starts`. The best local optimum wins, ties
// toward the earlier start.
BestResponse<CarControl> trajectory_best_response(const DrivingScene& dyn, const DriveState& x0,
                                                  const ControlSequence<CarControl>& u_r,
                                                  const RewardModel<DrivingScene>& model_h,
                                                  const ContinuousOptions& opts,
                                                  const ControlSequence<CarControl>* warm_start = nullptr);

// Single-agent ascent for either car with the other car's sequence fixed.
BestResponse<CarControl> optimize_agent(const DrivingScene& dyn, const DriveState& x0,
                                        const ControlSequence<CarControl>& other, Agent who,
                                        const RewardModel<DrivingScene>& model, const ContinuousOptions& opts,
                                        const ControlSequence<CarControl>* warm_start = nullptr);

// ---- Goal-directed Boltzmann walker (gridworld) ---------------------------

// Soft-optimal (maximum-entropy) walker: per-step reward -1 until the goal
// cell is reached; P(move) proportional to exp(beta (-1 + V(next) - V(here))), with V
// the soft value function. Goals are chosen with P(g) proportional to exp(-beta d(here, g)).
class GoalDirectedWalker {
public:
    GoalDirectedWalker(int width, int height, double beta);

    double beta() const { return beta_; }
    const std::vector<double>& soft_values(Cell goal) const;
    std::vector<double> move_log_weights(Cell at, Cell goal) const;
    Move sample_move(Cell at, Cell goal, Rng& rng) const;
    std::size_t sample_goal(Cell at, std::span<const Cell> goals, Rng& rng) const;

private:
    int width_;
    int height_;
    double beta_;
    mutable std::map<Cell, std::vector<double>> cache_;
};

}  // namespace hri
