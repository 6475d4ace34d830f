#pragma once

// One-shot object handover. The robot presents the object in orientation o;
// the human grasps it with grasp g (handover cost c1(g, o)) and then places
// it (goal cost c2(g)). As a two-step game: step 0 carries c1, step 1 carries
// c2; controls at step 1 are ignored.

#include <string>
#include <vector>

#include "hri/game.hpp"

namespace hri {

struct HandoverInstance {
    std::vector<std::string> orientations;   // O
    std::vector<std::string> grasps;         // G
    std::vector<std::vector<double>> c1;     // [g][o]
    std::vector<double> c2;                  // [g]

    void validate() const;
    int orientation_count() const { return static_cast<int>(orientations.size()); }
    int grasp_count() const { return static_cast<int>(grasps.size()); }
};

double handover_total_cost(int o, int g, const HandoverInstance& inst);

// argmin_g c1(g, o); ties toward the lowest grasp index.
int myopic_grasp(const HandoverInstance& inst, int o);
// argmin_g c1(g, o) + c2(g).
int global_grasp(const HandoverInstance& inst, int o);

// argmin_o of total cost when the human answers myopically.
int leader_plan_myopic(const HandoverInstance& inst);
// Orientation a planner picks if it assumes the human answers with the
// globally optimal grasp.
int leader_plan_assuming_global(const HandoverInstance& inst);

struct HandoverState {
    int orientation = -1;
    int grasp = -1;
    int time_step = 0;
    friend bool operator==(const HandoverState&, const HandoverState&) = default;
};

class HandoverGame {
public:
    using State = HandoverState;
    using Control = int;
    struct FeatureParams {};
    static constexpr bool kContinuous = false;
    enum FeatureIndex : Eigen::Index { kHandoverCost = 0, kPlacementCost = 1 };

    explicit HandoverGame(HandoverInstance inst);

    const HandoverInstance& instance() const { return inst_; }
    State initial_state() const { return {}; }
    State step(const State& x, int u_r, int u_h) const;
    FeatureVector features(const State& x, int u_r, int u_h, const FeatureParams&, Agent) const;
    Eigen::Index feature_dim() const { return 2; }
    void check_control(int u, Agent agent) const;
    Horizon horizon() const { return {2, 0.0}; }
    const std::vector<int>& actions(Agent agent) const { return agent == Agent::robot ? robot_actions_ : human_actions_; }

    // Shared reward: negative total cost.
    static Eigen::VectorXd default_weights() { return Eigen::Vector2d(-1.0, -1.0); }

private:
    HandoverInstance inst_;
    std::vector<int> robot_actions_;
    std::vector<int> human_actions_;
};

}  // namespace hri
