#include "hri/gridworld.hpp"

#include <bit>
#include <string>

namespace hri {

const char* to_string(Move m) {
    switch (m) {
        case Move::stay: return "stay";
        case Move::up: return "up";
        case Move::down: return "down";
        case Move::left: return "left";
        case Move::right: return "right";
    }
    return "?";
}

Move parse_move(std::string_view name) {
    for (Move m : kMoves) {
        if (name == to_string(m)) return m;
    }
    throw ArgumentError("unknown move '" + std::string(name) + "'");
}

Cell apply_move(Cell c, Move m, int width, int height) {
    Cell n = c;
    switch (m) {
        case Move::stay: break;
        case Move::up: ++n.y; break;
        case Move::down: --n.y; break;
        case Move::left: --n.x; break;
        case Move::right: ++n.x; break;
    }
    if (n.x < 0 || n.y < 0 || n.x >= width || n.y >= height) return c;
    return n;
}

GridworldCollect::GridworldCollect(int width, int height, std::vector<Cell> targets, int horizon)
    : width_(width), height_(height), targets_(std::move(targets)), horizon_(horizon) {
    if (width < 1 || height < 1) throw ConfigError("grid dimensions must be positive", "grid");
    if (static_cast<int>(targets_.size()) > kMaxTargets) {
        throw ConfigError("at most " + std::to_string(kMaxTargets) + " targets are supported", "grid/targets");
    }
    for (std::size_t i = 0; i < targets_.size(); ++i) {
        if (!in_bounds(targets_[i])) {
            throw ConfigError("target off grid", "grid/targets/" + std::to_string(i));
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (targets_[i] == targets_[j]) throw ConfigError("duplicate target", "grid/targets/" + std::to_string(i));
        }
    }
    Horizon{horizon_, 0.0}.validate(false);
}

GridState GridworldCollect::initial_state(Cell robot, Cell human) const {
    if (!in_bounds(robot)) throw ConfigError("robot start off grid", "robot");
    if (!in_bounds(human)) throw ConfigError("human start off grid", "human");
    GridState s{0, robot, human, 0};
    for (std::size_t i = 0; i < targets_.size(); ++i) {
        if (targets_[i] == robot || targets_[i] == human) s.collected |= 1u << i;
    }
    return s;
}

GridState GridworldCollect::step(const GridState& x, Move u_r, Move u_h) const {
    GridState n = x;
    n.robot = apply_move(x.robot, u_r, width_, height_);
    n.human = apply_move(x.human, u_h, width_, height_);
    for (std::size_t i = 0; i < targets_.size(); ++i) {
        if (targets_[i] == n.robot || targets_[i] == n.human) n.collected |= 1u << i;
    }
    n.time_step = x.time_step + 1;
    return n;
}

FeatureVector GridworldCollect::features(const GridState& x, Move u_r, Move u_h, const FeatureParams&,
                                         Agent) const {
    const GridState n = step(x, u_r, u_h);
    FeatureVector phi(2);
    phi[kStepsElapsed] = all_collected(x) ? 0.0 : 1.0;
    phi[kCollected] = static_cast<double>(std::popcount(n.collected & ~x.collected & full_mask()));
    return phi;
}

void GridworldCollect::check_control(Move u, Agent) const {
    if (static_cast<unsigned>(u) > static_cast<unsigned>(Move::right)) throw ArgumentError("invalid move");
}

void GridworldCollect::check_state(const GridState& x) const {
    if (!in_bounds(x.robot) || !in_bounds(x.human)) throw ArgumentError("agent off grid");
    if (x.time_step < 0 || x.time_step > horizon_) throw ArgumentError("time_step outside [0, T]");
    if ((x.collected & ~full_mask()) != 0) throw ArgumentError("collected flags reference unknown targets");
}

int GridworldCollect::uncollected_count(const GridState& x) const {
    return std::popcount(full_mask() & ~x.collected);
}

std::vector<int> GridworldCollect::uncollected(const GridState& x) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < targets_.size(); ++i) {
        if ((x.collected & (1u << i)) == 0) out.push_back(static_cast<int>(i));
    }
    return out;
}

}  // namespace hri
