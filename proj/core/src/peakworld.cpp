#include "hri/peakworld.hpp"

#include <string>

namespace hri {

PeakWorld::PeakWorld(int width, int height, std::vector<Cell> peaks, int horizon)
    : width_(width), height_(height), peaks_(std::move(peaks)), horizon_(horizon) {
    if (width < 1 || height < 1) throw ConfigError("grid dimensions must be positive", "grid");
    if (peaks_.empty()) throw ConfigError("at least one peak is required", "peaks");
    for (std::size_t i = 0; i < peaks_.size(); ++i) {
        const Cell c = peaks_[i];
        if (c.x < 0 || c.y < 0 || c.x >= width_ || c.y >= height_) {
            throw ConfigError("peak off grid", "peaks/" + std::to_string(i));
        }
    }
    Horizon{horizon_, 0.0}.validate(false);
}

PeakState PeakWorld::initial_state(Cell human) const {
    if (human.x < 0 || human.y < 0 || human.x >= width_ || human.y >= height_) {
        throw ConfigError("start off grid", "start");
    }
    return {human, 0};
}

PeakState PeakWorld::step(const PeakState& x, Move, Move u_h) const {
    return {apply_move(x.human, u_h, width_, height_), x.time_step + 1};
}

FeatureVector PeakWorld::features(const PeakState& x, Move u_r, Move u_h, const FeatureParams&, Agent) const {
    const Cell c = step(x, u_r, u_h).human;
    FeatureVector phi = FeatureVector::Zero(feature_dim());
    for (std::size_t k = 0; k < peaks_.size(); ++k) {
        if (peaks_[k] == c) phi[static_cast<Eigen::Index>(k)] = 1.0;
    }
    return phi;
}

void PeakWorld::check_control(Move u, Agent) const {
    if (static_cast<unsigned>(u) > static_cast<unsigned>(Move::right)) throw ArgumentError("invalid move");
}

std::vector<Cell> PeakWorld::path(Cell start, std::span<const Move> moves) const {
    std::vector<Cell> out{start};
    for (Move m : moves) out.push_back(apply_move(out.back(), m, width_, height_));
    return out;
}

}  // namespace hri
