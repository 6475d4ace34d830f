#include "hri/handover.hpp"

#include <cmath>
#include <limits>

namespace hri {

void HandoverInstance::validate() const {
    if (orientations.empty()) throw ConfigError("orientation set is empty", "orientations");
    if (grasps.empty()) throw ConfigError("grasp set is empty", "grasps");
    if (c1.size() != grasps.size()) throw ConfigError("c1 needs one row per grasp", "c1");
    for (std::size_t g = 0; g < c1.size(); ++g) {
        if (c1[g].size() != orientations.size()) {
            throw ConfigError("c1 row needs one entry per orientation", "c1/" + std::to_string(g));
        }
        for (std::size_t o = 0; o < c1[g].size(); ++o) {
            if (!std::isfinite(c1[g][o]) || c1[g][o] < 0.0) {
                throw ConfigError("costs must be finite and >= 0", "c1/" + std::to_string(g) + "/" + std::to_string(o));
            }
        }
    }
    if (c2.size() != grasps.size()) throw ConfigError("c2 needs one entry per grasp", "c2");
    for (std::size_t g = 0; g < c2.size(); ++g) {
        if (!std::isfinite(c2[g]) || c2[g] < 0.0) {
            throw ConfigError("costs must be finite and >= 0", "c2/" + std::to_string(g));
        }
    }
}

double handover_total_cost(int o, int g, const HandoverInstance& inst) {
    if (o < 0 || o >= inst.orientation_count()) throw ArgumentError("unknown orientation " + std::to_string(o));
    if (g < 0 || g >= inst.grasp_count()) throw ArgumentError("unknown grasp " + std::to_string(g));
    return inst.c1[static_cast<std::size_t>(g)][static_cast<std::size_t>(o)] + inst.c2[static_cast<std::size_t>(g)];
}

namespace {

template <class Cost>
int argmin_index(int n, Cost cost) {
    int best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double c = cost(i);
        if (c < best_cost) {
            best_cost = c;
            best = i;
        }
    }
    if (best < 0) throw DomainError("empty action set");
    return best;
}

}  // namespace

int myopic_grasp(const HandoverInstance& inst, int o) {
    if (o < 0 || o >= inst.orientation_count()) throw ArgumentError("unknown orientation " + std::to_string(o));
    return argmin_index(inst.grasp_count(), [&](int g) {
        return inst.c1[static_cast<std::size_t>(g)][static_cast<std::size_t>(o)];
    });
}

int global_grasp(const HandoverInstance& inst, int o) {
    return argmin_index(inst.grasp_count(), [&](int g) { return handover_total_cost(o, g, inst); });
}

int leader_plan_myopic(const HandoverInstance& inst) {
    return argmin_index(inst.orientation_count(),
                        [&](int o) { return handover_total_cost(o, myopic_grasp(inst, o), inst); });
}

int leader_plan_assuming_global(const HandoverInstance& inst) {
    return argmin_index(inst.orientation_count(),
                        [&](int o) { return handover_total_cost(o, global_grasp(inst, o), inst); });
}

HandoverGame::HandoverGame(HandoverInstance inst) : inst_(std::move(inst)) {
    inst_.validate();
    for (int o = 0; o < inst_.orientation_count(); ++o) robot_actions_.push_back(o);
    for (int g = 0; g < inst_.grasp_count(); ++g) human_actions_.push_back(g);
}

HandoverState HandoverGame::step(const HandoverState& x, int u_r, int u_h) const {
    HandoverState n = x;
    if (x.time_step == 0) {
        n.orientation = u_r;
        n.grasp = u_h;
    }
    n.time_step = x.time_step + 1;
    return n;
}

FeatureVector HandoverGame::features(const HandoverState& x, int u_r, int u_h, const FeatureParams&,
                                     Agent) const {
    FeatureVector phi = FeatureVector::Zero(2);
    if (x.time_step == 0) {
        phi[kHandoverCost] = inst_.c1[static_cast<std::size_t>(u_h)][static_cast<std::size_t>(u_r)];
    } else if (x.time_step == 1 && x.grasp >= 0) {
        phi[kPlacementCost] = inst_.c2[static_cast<std::size_t>(x.grasp)];
    }
    return phi;
}

void HandoverGame::check_control(int u, Agent agent) const {
    const int n = agent == Agent::robot ? inst_.orientation_count() : inst_.grasp_count();
    if (u < 0 || u >= n) throw ArgumentError(std::string(to_string(agent)) + " control index out of range");
}

}  // namespace hri
