#pragma once

// Collaborative target collection on a 4-connected grid. Both agents move
// simultaneously, may share a cell, and collect any target they stand on.

#include <array>
#include <compare>
#include <cstdlib>
#include <span>
#include <cstdint>
#include <string_view>
#include <vector>

#include "hri/game.hpp"

namespace hri {

// Canonical action order; every tie in the library breaks toward the
// earliest move in this list.
enum class Move : std::uint8_t { stay, up, down, left, right };
inline constexpr std::array<Move, 5> kMoves{Move::stay, Move::up, Move::down, Move::left, Move::right};

const char* to_string(Move m);
Move parse_move(std::string_view name);

struct Cell {
    int x = 0;
    int y = 0;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

// One-cell move; off-grid moves leave the cell unchanged.
Cell apply_move(Cell c, Move m, int width, int height);

struct GridState {
    std::uint32_t collected = 0;  // bit i set once target i has been collected
    Cell robot;
    Cell human;
    int time_step = 0;
    friend bool operator==(const GridState&, const GridState&) = default;
};

class GridworldCollect {
public:
    using State = GridState;
    using Control = Move;
    struct FeatureParams {};
    static constexpr bool kContinuous = false;
    static constexpr int kMaxTargets = 16;

    // Feature indices: steps_elapsed is 1 while any target is uncollected at
    // the pre-step state; collected counts targets picked up by the step.
    enum FeatureIndex : Eigen::Index { kStepsElapsed = 0, kCollected = 1 };

    GridworldCollect(int width, int height, std::vector<Cell> targets, int horizon);

    int width() const { return width_; }
    int height() const { return height_; }
    const std::vector<Cell>& targets() const { return targets_; }
    std::uint32_t full_mask() const { return (targets_.empty() ? 0u : ((1u << targets_.size()) - 1u)); }

    State initial_state(Cell robot, Cell human) const;
    State step(const State& x, Move u_r, Move u_h) const;
    FeatureVector features(const State& x, Move u_r, Move u_h, const FeatureParams&, Agent) const;
    Eigen::Index feature_dim() const { return 2; }
    void check_control(Move u, Agent) const;
    void check_state(const State& x) const;
    Horizon horizon() const { return {horizon_, 0.0}; }
    std::span<const Move> actions(Agent) const { return kMoves; }

    bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
    bool all_collected(const State& x) const { return (x.collected & full_mask()) == full_mask(); }
    int uncollected_count(const State& x) const;
    std::vector<int> uncollected(const State& x) const;

    // theta = (time_penalty, collect_bonus) = (-1, +10)
    static Eigen::VectorXd default_weights() { return Eigen::Vector2d(-1.0, 10.0); }

private:
    int width_;
    int height_;
    std::vector<Cell> targets_;
    int horizon_;
};

}  // namespace hri
