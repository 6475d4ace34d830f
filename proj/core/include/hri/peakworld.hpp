#pragma once

// Single-demonstrator grid used for learning from demonstration: the human
// walks a grid whose reward features count visits to "peak" cells. The robot
// is a passive observer; its controls are accepted and ignored.

#include <span>
#include <vector>

#include "hri/gridworld.hpp"

namespace hri {

struct PeakState {
    Cell human;
    int time_step = 0;
    friend bool operator==(const PeakState&, const PeakState&) = default;
};

class PeakWorld {
public:
    using State = PeakState;
    using Control = Move;
    struct FeatureParams {};
    static constexpr bool kContinuous = false;

    PeakWorld(int width, int height, std::vector<Cell> peaks, int horizon);

    const std::vector<Cell>& peaks() const { return peaks_; }
    int width() const { return width_; }
    int height() const { return height_; }

    State initial_state(Cell human) const;
    State step(const State& x, Move u_r, Move u_h) const;
    // phi_k = 1 when the human's successor cell is peak k.
    FeatureVector features(const State& x, Move u_r, Move u_h, const FeatureParams&, Agent) const;
    Eigen::Index feature_dim() const { return static_cast<Eigen::Index>(peaks_.size()); }
    void check_control(Move u, Agent) const;
    Horizon horizon() const { return {horizon_, 0.0}; }
    std::span<const Move> actions(Agent) const { return kMoves; }

    // Cells occupied along a human move sequence, start cell included.
    std::vector<Cell> path(Cell start, std::span<const Move> moves) const;

private:
    int width_;
    int height_;
    std::vector<Cell> peaks_;
    int horizon_;
};

}  // namespace hri
