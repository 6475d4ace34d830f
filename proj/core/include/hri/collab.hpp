#pragma once

// Exact centralized planning for the collaborative gridworld.
//
// With a non-positive time penalty and a non-negative collection bonus an
// optimal joint plan sends each agent along shortest paths through an
// ordered list of targets, so the value of a state is a maximum over target
// assignments and visit orders. Ties in value are broken by a secondary
// objective, the (negated) sum of target collection times, which makes the
// robot pick targets up early instead of idling.

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>

#include "hri/gridworld.hpp"

namespace hri {

struct CollabValue {
    double primary = 0.0;
    double secondary = 0.0;
};

struct JointAction {
    Move robot = Move::stay;
    Move human = Move::stay;
};

struct JointPlan {
    ControlSequence<Move> robot;
    ControlSequence<Move> human;
    double value = 0.0;
};

class CollabSolver {
public:
    static constexpr int kMaxTargets = 6;

    CollabSolver(const GridworldCollect& dyn, Eigen::VectorXd weights);

    const GridworldCollect& domain() const { return dyn_; }

    // Optimal value from `x` with `remaining` steps left. When `human_first`
    // names a target, only plans whose human walks to that cell first are
    // considered, even if the robot collects it on the way.
    CollabValue value(const GridState& x, int remaining, std::optional<int> human_first = std::nullopt) const;

    // First joint action of an optimal plan: the earliest pair in canonical
    // (robot-major) order whose value matches.
    JointAction first_action(const GridState& x, int remaining, std::optional<int> human_first = std::nullopt) const;

    // Full optimal joint plan over the domain horizon from x0.
    JointPlan plan(const GridState& x0) const;

private:
    int active_first(const GridState& x, std::optional<int> human_first) const;
    CollabValue solve(Cell r, Cell h, std::uint32_t todo, int remaining, int human_first) const;

    const GridworldCollect& dyn_;
    double time_penalty_;
    double bonus_;
    mutable std::unordered_map<std::uint64_t, CollabValue> memo_;
};

}  // namespace hri
