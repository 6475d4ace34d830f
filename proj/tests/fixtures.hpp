#pragma once

#include <algorithm>
#include <filesystem>
#include <string>

#include "hri/driving.hpp"
#include "hri/numeric.hpp"

namespace hri::testing {

inline std::filesystem::path scenario_dir() { return HRIGAME_SCENARIO_DIR; }

inline DrivingScene two_lane_scene(int T = 20) {
    return DrivingScene(Road{{0.0, 4.0}, 4.0}, ControlBounds{}, 20.0, Horizon{T, 0.1});
}

inline Eigen::VectorXd driving_weights(double lane, double speed, double collision, double off_road,
                                       double progress) {
    Eigen::VectorXd w(5);
    w << lane, speed, collision, off_road, progress;
    return w;
}

// Random in-bounds instance whose speeds stay away from the clamps.
struct DrivingInstance {
    DriveState x0;
    ControlSequence<CarControl> u_r;
    ControlSequence<CarControl> u_h;
    Eigen::VectorXd weights;
    DriverFeatureParams params;
};

inline DrivingInstance random_instance(Rng& rng, int T) {
    auto u = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
    DrivingInstance in;
    in.x0.robot = {u(-5, 5), u(-1, 5), u(-0.3, 0.3), u(4, 16)};
    in.x0.human = {u(-5, 5), u(-1, 5), u(-0.3, 0.3), u(4, 16)};
    for (int t = 0; t < T; ++t) {
        in.u_r.push_back({u(-0.8, 0.8), u(-1.5, 1.5)});
        in.u_h.push_back({u(-0.8, 0.8), u(-1.5, 1.5)});
    }
    in.weights = driving_weights(u(-2, 2), u(-2, 2), u(-20, 20), u(-5, 5), u(-2, 2));
    in.params = {u(-1, 5), u(5, 15), u(1, 4)};
    return in;
}

// Relative error against a finite-difference gradient. Gradients smaller
// than 1e-3 in norm are compared on an absolute 1e-3 scale: below that the
// central-difference roundoff (about eps |R| / h) is no longer negligible.
inline double gradient_relative_error(const Eigen::VectorXd& g, const Eigen::VectorXd& fd) {
    return (g - fd).norm() / std::max(fd.norm(), 1e-3);
}

}  // namespace hri::testing
