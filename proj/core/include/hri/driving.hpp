#pragma once

// Two cars on a straight multi-lane road, forward-Euler unicycle dynamics.
// The road runs along +x; lanes are horizontal strips centered at
// `lane_centers` (meters, y axis).

#include <vector>

#include "hri/game.hpp"

namespace hri {

struct CarState {
    double x = 0.0;        // m
    double y = 0.0;        // m
    double heading = 0.0;  // rad, (-pi, pi]
    double speed = 0.0;    // m/s, [0, v_max]
    friend bool operator==(const CarState&, const CarState&) = default;
};

struct CarControl {
    double steer = 0.0;  // heading rate, rad/s
    double accel = 0.0;  // m/s^2
    friend bool operator==(const CarControl&, const CarControl&) = default;
};

struct DriveState {
    CarState robot;
    CarState human;
    int time_step = 0;
    friend bool operator==(const DriveState&, const DriveState&) = default;
};

struct Road {
    std::vector<double> lane_centers{0.0, 3.5};
    double lane_width = 3.5;

    double y_min() const;
    double y_max() const;
};

struct ControlBounds {
    double steer_max = 1.0;  // |steer| <= steer_max
    double accel_min = -6.0;
    double accel_max = 3.0;
};

// Per-driver feature settings; together with the weight vector these define
// a driving style.
struct DriverFeatureParams {
    double preferred_lane_y = 0.0;
    double desired_speed = 10.0;
    double collision_sigma = 2.0;
};

double wrap_angle(double a);

class DrivingScene {
public:
    using State = DriveState;
    using Control = CarControl;
    using FeatureParams = DriverFeatureParams;
    static constexpr bool kContinuous = true;
    static constexpr int kStateDim = 4;    // per car
    static constexpr int kControlDim = 2;  // per car

    // All features are evaluated on the successor state, from the point of
    // view of the reward owner's car ("ego"):
    //   lane        exp(-(y - y_pref)^2 / (w/2)^2)           in (0, 1], max on the preferred centerline
    //   speed_dev   (v - v_des)^2                            >= 0, reward it with a negative weight
    //   collision   exp(-d^2 / sigma^2), d = car distance    in (0, 1], negative weight
    //   off_road    squared distance beyond the road edge    >= 0, zero on the road, negative weight
    //   progress    v cos(heading) dt                        forward displacement per step
    enum FeatureIndex : Eigen::Index { kLane = 0, kSpeedDeviation, kCollision, kOffRoad, kProgress, kFeatureCount };

    DrivingScene(Road road, ControlBounds bounds, double v_max, Horizon horizon);

    const Road& road() const { return road_; }
    const ControlBounds& bounds() const { return bounds_; }
    double v_max() const { return v_max_; }
    double dt() const { return horizon_.dt; }

    CarState step_car(const CarState& c, const CarControl& u) const;
    State step(const State& x, const Control& u_r, const Control& u_h) const;
    FeatureVector features(const State& x, const Control& u_r, const Control& u_h, const FeatureParams& params,
                           Agent owner) const;
    FeatureVector state_features(const State& s, const FeatureParams& params, Agent owner) const;
    Eigen::Index feature_dim() const { return kFeatureCount; }
    void check_control(const Control& u, Agent agent) const;
    void check_state(const State& x) const;
    Horizon horizon() const { return horizon_; }

    // Cumulative reward and its gradient with respect to both agents'
    // flattened controls [steer_0, accel_0, steer_1, ...], via a reverse
    // (adjoint) sweep over the rollout. Either gradient pointer may be null.
    double reward_and_gradients(const State& x0, const ControlSequence<Control>& u_r,
                                const ControlSequence<Control>& u_h, const FeatureParams& params, Agent owner,
                                const Eigen::VectorXd& weights, Eigen::VectorXd* grad_robot,
                                Eigen::VectorXd* grad_human) const;

    Eigen::VectorXd reward_gradient(const State& x0, const ControlSequence<Control>& u_r,
                                    const ControlSequence<Control>& u_h, const FeatureParams& params, Agent owner,
                                    const Eigen::VectorXd& weights, Agent wrt) const;

private:
    Road road_;
    ControlBounds bounds_;
    double v_max_;
    Horizon horizon_;
};

Eigen::VectorXd flatten(const ControlSequence<CarControl>& u);
ControlSequence<CarControl> unflatten(const Eigen::VectorXd& v);

}  // namespace hri
