#include "hri/driving.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hri {

double Road::y_min() const {
    return *std::min_element(lane_centers.begin(), lane_centers.end()) - lane_width / 2.0;
}

double Road::y_max() const {
    return *std::max_element(lane_centers.begin(), lane_centers.end()) + lane_width / 2.0;
}

double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * M_PI);
    if (w <= -M_PI) w += 2.0 * M_PI;
    return w;
}

DrivingScene::DrivingScene(Road road, ControlBounds bounds, double v_max, Horizon horizon)
    : road_(std::move(road)), bounds_(bounds), v_max_(v_max), horizon_(horizon) {
    if (road_.lane_centers.empty()) throw ConfigError("road needs at least one lane", "road/lane_centers");
    if (!(road_.lane_width > 0.0)) throw ConfigError("lane width must be > 0", "road/lane_width");
    if (!(v_max_ > 0.0)) throw ConfigError("v_max must be > 0", "v_max");
    if (!(bounds_.steer_max > 0.0)) throw ConfigError("steer_max must be > 0", "bounds/steer_max");
    if (!(bounds_.accel_min < bounds_.accel_max)) throw ConfigError("accel_min must be < accel_max", "bounds");
    horizon_.validate(true);
}

CarState DrivingScene::step_car(const CarState& c, const CarControl& u) const {
    const double dt = horizon_.dt;
    CarState n;
    n.x = c.x + c.speed * std::cos(c.heading) * dt;
    n.y = c.y + c.speed * std::sin(c.heading) * dt;
    n.heading = wrap_angle(c.heading + u.steer * dt);
    n.speed = std::clamp(c.speed + u.accel * dt, 0.0, v_max_);
    return n;
}

DriveState DrivingScene::step(const DriveState& x, const CarControl& u_r, const CarControl& u_h) const {
    return DriveState{step_car(x.robot, u_r), step_car(x.human, u_h), x.time_step + 1};
}

FeatureVector DrivingScene::state_features(const DriveState& s, const DriverFeatureParams& p, Agent owner) const {
    const CarState& ego = owner == Agent::robot ? s.robot : s.human;
    const CarState& other = owner == Agent::robot ? s.human : s.robot;
    const double half = road_.lane_width / 2.0;
    FeatureVector phi(kFeatureCount);
    const double dy = ego.y - p.preferred_lane_y;
    phi[kLane] = std::exp(-dy * dy / (half * half));
    const double dv = ego.speed - p.desired_speed;
    phi[kSpeedDeviation] = dv * dv;
    const double dx = ego.x - other.x;
    const double dyo = ego.y - other.y;
    phi[kCollision] = std::exp(-(dx * dx + dyo * dyo) / (p.collision_sigma * p.collision_sigma));
    const double above = std::max(0.0, ego.y - road_.y_max());
    const double below = std::max(0.0, road_.y_min() - ego.y);
    phi[kOffRoad] = above * above + below * below;
    phi[kProgress] = ego.speed * std::cos(ego.heading) * horizon_.dt;
    return phi;
}

FeatureVector DrivingScene::features(const DriveState& x, const CarControl& u_r, const CarControl& u_h,
                                     const DriverFeatureParams& p, Agent owner) const {
    return state_features(step(x, u_r, u_h), p, owner);
}

void DrivingScene::check_control(const CarControl& u, Agent agent) const {
    const bool ok = std::isfinite(u.steer) && std::isfinite(u.accel) && std::abs(u.steer) <= bounds_.steer_max &&
                    u.accel >= bounds_.accel_min && u.accel <= bounds_.accel_max;
    if (!ok) {
        throw ArgumentError(std::string(to_string(agent)) + " control out of bounds: steer=" +
                            std::to_string(u.steer) + " accel=" + std::to_string(u.accel));
    }
}

void DrivingScene::check_state(const DriveState& x) const {
    for (const CarState* c : {&x.robot, &x.human}) {
        if (!(c->speed >= 0.0 && c->speed <= v_max_)) throw ArgumentError("speed outside [0, v_max]");
        if (!(c->heading > -M_PI && c->heading <= M_PI)) throw ArgumentError("heading outside (-pi, pi]");
        if (!std::isfinite(c->x) || !std::isfinite(c->y)) throw ArgumentError("non-finite position");
    }
}

namespace {

using Mat4 = Eigen::Matrix4d;
using Mat42 = Eigen::Matrix<double, 4, 2>;
using Vec4 = Eigen::Vector4d;

// Jacobians of step_car w.r.t. (x, y, heading, speed) and (steer, accel).
void car_jacobians(const CarState& c, const CarControl& u, double dt, double v_max, Mat4& fs, Mat42& fu) {
    fs.setIdentity();
    fu.setZero();
    const double cs = std::cos(c.heading), sn = std::sin(c.heading);
    fs(0, 2) = -c.speed * sn * dt;
    fs(0, 3) = cs * dt;
    fs(1, 2) = c.speed * cs * dt;
    fs(1, 3) = sn * dt;
    fu(2, 0) = dt;
    const double v_next = c.speed + u.accel * dt;
    if (v_next > 0.0 && v_next < v_max) {
        fu(3, 1) = dt;
    } else {
        fs(3, 3) = 0.0;
    }
}

}  // namespace

double DrivingScene::reward_and_gradients(const DriveState& x0, const ControlSequence<CarControl>& u_r,
                                          const ControlSequence<CarControl>& u_h, const DriverFeatureParams& p,
                                          Agent owner, const Eigen::VectorXd& w, Eigen::VectorXd* grad_robot,
                                          Eigen::VectorXd* grad_human) const {
    if (w.size() != kFeatureCount) throw ConfigError("driving reward needs 5 weights", "weights");
    if (u_r.size() != u_h.size()) throw ArgumentError("control sequence length mismatch");
    const std::size_t T = u_r.size();
    const double dt = horizon_.dt;

    std::vector<DriveState> s(T + 1);
    s[0] = x0;
    for (std::size_t t = 0; t < T; ++t) s[t + 1] = step(s[t], u_r[t], u_h[t]);

    double total = 0.0;
    for (std::size_t t = 1; t <= T; ++t) {
        const FeatureVector phi = state_features(s[t], p, owner);
        if (!phi.allFinite()) throw DomainError("feature map produced a non-finite value");
        total += w.dot(phi);
    }
    if (grad_robot == nullptr && grad_human == nullptr) return total;

    // d(theta . phi(s)) / d(ego state, other state)
    const double half = road_.lane_width / 2.0;
    const double sig2 = p.collision_sigma * p.collision_sigma;
    auto reward_state_grad = [&](const DriveState& st, Vec4& g_ego, Vec4& g_other) {
        const CarState& ego = owner == Agent::robot ? st.robot : st.human;
        const CarState& other = owner == Agent::robot ? st.human : st.robot;
        g_ego.setZero();
        g_other.setZero();
        const double dy = ego.y - p.preferred_lane_y;
        const double lane = std::exp(-dy * dy / (half * half));
        g_ego[1] += w[kLane] * lane * (-2.0 * dy / (half * half));
        g_ego[3] += w[kSpeedDeviation] * 2.0 * (ego.speed - p.desired_speed);
        const double dx = ego.x - other.x, dyo = ego.y - other.y;
        const double col = std::exp(-(dx * dx + dyo * dyo) / sig2);
        g_ego[0] += w[kCollision] * col * (-2.0 * dx / sig2);
        g_ego[1] += w[kCollision] * col * (-2.0 * dyo / sig2);
        g_other[0] -= w[kCollision] * col * (-2.0 * dx / sig2);
        g_other[1] -= w[kCollision] * col * (-2.0 * dyo / sig2);
        const double above = std::max(0.0, ego.y - road_.y_max());
        const double below = std::max(0.0, road_.y_min() - ego.y);
        g_ego[1] += w[kOffRoad] * (2.0 * above - 2.0 * below);
        g_ego[2] += w[kProgress] * (-ego.speed * std::sin(ego.heading) * dt);
        g_ego[3] += w[kProgress] * std::cos(ego.heading) * dt;
    };

    if (grad_robot) grad_robot->setZero(static_cast<Eigen::Index>(2 * T));
    if (grad_human) grad_human->setZero(static_cast<Eigen::Index>(2 * T));

    Vec4 lam_r, lam_h, g_ego, g_other;
    reward_state_grad(s[T], g_ego, g_other);
    lam_r = owner == Agent::robot ? g_ego : g_other;
    lam_h = owner == Agent::robot ? g_other : g_ego;
    Mat4 fs_r, fs_h;
    Mat42 fu_r, fu_h;
    for (std::size_t k = T; k-- > 0;) {
        car_jacobians(s[k].robot, u_r[k], dt, v_max_, fs_r, fu_r);
        car_jacobians(s[k].human, u_h[k], dt, v_max_, fs_h, fu_h);
        const auto i = static_cast<Eigen::Index>(2 * k);
        if (grad_robot) grad_robot->segment<2>(i) = fu_r.transpose() * lam_r;
        if (grad_human) grad_human->segment<2>(i) = fu_h.transpose() * lam_h;
        if (k == 0) break;
        Vec4 next_r = fs_r.transpose() * lam_r;
        Vec4 next_h = fs_h.transpose() * lam_h;
        reward_state_grad(s[k], g_ego, g_other);
        if (owner == Agent::robot) {
            next_r += g_ego;
            next_h += g_other;
        } else {
            next_r += g_other;
            next_h += g_ego;
        }
        lam_r = next_r;
        lam_h = next_h;
    }
    return total;
}

Eigen::VectorXd DrivingScene::reward_gradient(const DriveState& x0, const ControlSequence<CarControl>& u_r,
                                              const ControlSequence<CarControl>& u_h, const DriverFeatureParams& p,
                                              Agent owner, const Eigen::VectorXd& w, Agent wrt) const {
    Eigen::VectorXd g;
    if (wrt == Agent::robot) {
        reward_and_gradients(x0, u_r, u_h, p, owner, w, &g, nullptr);
    } else {
        reward_and_gradients(x0, u_r, u_h, p, owner, w, nullptr, &g);
    }
    return g;
}

Eigen::VectorXd flatten(const ControlSequence<CarControl>& u) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(2 * u.size()));
    for (std::size_t t = 0; t < u.size(); ++t) {
        v[static_cast<Eigen::Index>(2 * t)] = u[t].steer;
        v[static_cast<Eigen::Index>(2 * t + 1)] = u[t].accel;
    }
    return v;
}

ControlSequence<CarControl> unflatten(const Eigen::VectorXd& v) {
    if (v.size() % 2 != 0) throw ArgumentError("flattened driving controls must have even length");
    ControlSequence<CarControl> u(static_cast<std::size_t>(v.size() / 2));
    for (std::size_t t = 0; t < u.size(); ++t) {
        u[t] = {v[static_cast<Eigen::Index>(2 * t)], v[static_cast<Eigen::Index>(2 * t + 1)]};
    }
    return u;
}

}  // namespace hri
