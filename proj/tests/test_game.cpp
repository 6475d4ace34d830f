#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "hri/driving.hpp"
#include "hri/game.hpp"
#include "hri/gridworld.hpp"
#include "hri/optimize.hpp"

using namespace hri;
using namespace hri::testing;

namespace {

// Minimal domain with a fixed feature vector, to exercise the arithmetic.
struct ConstantDomain {
    using State = int;
    using Control = int;
    struct FeatureParams {};
    static constexpr bool kContinuous = false;
    Eigen::VectorXd phi;
    int step(int x, int, int) const { return x + 1; }
    FeatureVector features(int, int, int, const FeatureParams&, Agent) const { return phi; }
    Eigen::Index feature_dim() const { return phi.size(); }
    void check_control(int, Agent) const {}
    Horizon horizon() const { return {3, 0.0}; }
};

}  // namespace

TEST(StepReward, ZeroWeightsGiveZero) {
    ConstantDomain d{Eigen::Vector2d(2.5, 7.0)};
    EXPECT_EQ(step_reward(d, 0, 0, 0, make_reward<ConstantDomain>(Eigen::Vector2d::Zero(), Agent::robot)), 0.0);
}

TEST(StepReward, InnerProduct) {
    ConstantDomain d{Eigen::Vector2d(2.5, 7.0)};
    EXPECT_DOUBLE_EQ(step_reward(d, 0, 0, 0, make_reward<ConstantDomain>(Eigen::Vector2d(1, 0), Agent::robot)), 2.5);
}

TEST(StepReward, GridworldStepThatCollects) {
    GridworldCollect g(3, 1, {{1, 0}}, 3);
    const auto x = g.initial_state({2, 0}, {0, 0});
    const auto m = make_reward<GridworldCollect>(GridworldCollect::default_weights(), Agent::robot);
    EXPECT_DOUBLE_EQ(step_reward(g, x, Move::stay, Move::right, m), 9.0);
}

TEST(StepReward, DimensionMismatchIsConfigError) {
    ConstantDomain d{Eigen::Vector2d(1, 1)};
    EXPECT_THROW(step_reward(d, 0, 0, 0, make_reward<ConstantDomain>(Eigen::Vector3d(1, 1, 1), Agent::robot)),
                 ConfigError);
}

TEST(CumulativeReward, ZeroWeightsAndSingleStep) {
    GridworldCollect g(4, 4, {{3, 3}}, 1);
    const auto x0 = g.initial_state({0, 0}, {1, 1});
    const auto zero = make_reward<GridworldCollect>(Eigen::Vector2d::Zero(), Agent::robot);
    EXPECT_EQ(cumulative_reward(g, x0, {Move::up}, {Move::right}, zero), 0.0);
    const auto m = make_reward<GridworldCollect>(GridworldCollect::default_weights(), Agent::robot);
    EXPECT_DOUBLE_EQ(cumulative_reward(g, x0, {Move::up}, {Move::right}, m),
                     step_reward(g, x0, Move::up, Move::right, m));
}

TEST(CumulativeReward, ThreeStepEpisodeCollectingAtTheEnd) {
    // Human walks three cells to the only target; -1 per step, +10 on arrival.
    GridworldCollect g(4, 4, {{3, 0}}, 3);
    const auto x0 = g.initial_state({0, 3}, {0, 0});
    const auto m = make_reward<GridworldCollect>(GridworldCollect::default_weights(), Agent::robot);
    const ControlSequence<Move> ur(3, Move::stay), uh(3, Move::right);
    double hand = 0.0;
    auto x = x0;
    for (int t = 0; t < 3; ++t) {
        const auto n = g.step(x, ur[t], uh[t]);
        hand += -1.0 + 10.0 * std::popcount(n.collected & ~x.collected);
        x = n;
    }
    EXPECT_DOUBLE_EQ(hand, 7.0);
    EXPECT_DOUBLE_EQ(cumulative_reward(g, x0, ur, uh, m), 7.0);
}

TEST(CumulativeReward, LengthMismatchIsArgumentError) {
    GridworldCollect g(2, 2, {}, 2);
    const auto m = make_reward<GridworldCollect>(GridworldCollect::default_weights(), Agent::robot);
    EXPECT_THROW(cumulative_reward(g, g.initial_state({0, 0}, {1, 1}), {Move::stay}, {Move::stay, Move::stay}, m),
                 ArgumentError);
}

TEST(Rollout, ReturnsTPlusOneStatesAndStaysPut) {
    GridworldCollect g(3, 3, {{2, 2}}, 4);
    const auto x0 = g.initial_state({0, 0}, {1, 0});
    const auto states = rollout(g, x0, ControlSequence<Move>(4, Move::stay), ControlSequence<Move>(4, Move::stay));
    ASSERT_EQ(states.size(), 5u);
    EXPECT_EQ(states[0], x0);
    for (std::size_t t = 1; t < states.size(); ++t) {
        EXPECT_EQ(states[t].robot, x0.robot);
        EXPECT_EQ(states[t].human, x0.human);
        EXPECT_EQ(states[t].time_step, static_cast<int>(t));
    }
}

TEST(Rollout, DrivingZeroSpeedIsFixedPoint) {
    const auto d = two_lane_scene(10);
    DriveState x0{{1.0, 2.0, 0.3, 0.0}, {-3.0, 0.0, 0.0, 0.0}, 0};
    const auto states = rollout(d, x0, ControlSequence<CarControl>(10), ControlSequence<CarControl>(10));
    for (const auto& s : states) {
        EXPECT_EQ(s.robot.x, 1.0);
        EXPECT_EQ(s.robot.y, 2.0);
        EXPECT_EQ(s.human.x, -3.0);
    }
}

TEST(Rollout, ConstantAccelerationMatchesClosedFormEuler) {
    const auto d = two_lane_scene(10);
    const double a = 1.5, dt = 0.1;
    DriveState x0{{0.0, 0.0, 0.0, 5.0}, {0.0, 4.0, 0.0, 0.0}, 0};
    const auto states =
        rollout(d, x0, ControlSequence<CarControl>(10, CarControl{0.0, a}), ControlSequence<CarControl>(10));
    // x_k = sum_{j<k} (v0 + a j dt) dt, v_k = v0 + a k dt
    for (int k = 0; k <= 10; ++k) {
        double x = 0.0;
        for (int j = 0; j < k; ++j) x += (5.0 + a * j * dt) * dt;
        EXPECT_NEAR(states[static_cast<std::size_t>(k)].robot.x, x, 1e-12);
        EXPECT_NEAR(states[static_cast<std::size_t>(k)].robot.speed, 5.0 + a * k * dt, 1e-12);
        EXPECT_EQ(states[static_cast<std::size_t>(k)].robot.y, 0.0);
    }
}

TEST(Rollout, OutOfBoundsControlRejected) {
    const auto d = two_lane_scene(2);
    DriveState x0{};
    ControlSequence<CarControl> bad{{0.0, 0.0}, {5.0, 0.0}};
    EXPECT_THROW(rollout(d, x0, bad, ControlSequence<CarControl>(2)), ArgumentError);
}

TEST(Rollout, Deterministic) {
    Rng rng(5);
    const auto in = random_instance(rng, 20);
    const auto d = two_lane_scene(20);
    EXPECT_EQ(rollout(d, in.x0, in.u_r, in.u_h), rollout(d, in.x0, in.u_r, in.u_h));
}

TEST(RewardProperties, LinearInWeights) {
    Rng rng(17);
    const auto d = two_lane_scene(20);
    for (int trial = 0; trial < 20; ++trial) {
        const auto in = random_instance(rng, 20);
        const auto w1 = random_instance(rng, 1).weights, w2 = random_instance(rng, 1).weights;
        const double alpha = rng.uniform() * 4 - 2, beta = rng.uniform() * 4 - 2;
        auto R = [&](const Eigen::VectorXd& w) {
            return cumulative_reward(d, in.x0, in.u_r, in.u_h, RewardModel<DrivingScene>{in.params, w, Agent::robot});
        };
        const double lhs = R(alpha * w1 + beta * w2), rhs = alpha * R(w1) + beta * R(w2);
        EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(rhs)));
    }
}

TEST(RewardProperties, TimeAdditive) {
    Rng rng(19);
    const auto d = two_lane_scene(20);
    const auto in = random_instance(rng, 20);
    const RewardModel<DrivingScene> m{in.params, in.weights, Agent::human};
    const auto states = rollout(d, in.x0, in.u_r, in.u_h);
    for (std::size_t k = 1; k < 20; ++k) {
        const ControlSequence<CarControl> r0(in.u_r.begin(), in.u_r.begin() + k), h0(in.u_h.begin(), in.u_h.begin() + k);
        const ControlSequence<CarControl> r1(in.u_r.begin() + k, in.u_r.end()), h1(in.u_h.begin() + k, in.u_h.end());
        const double whole = cumulative_reward(d, in.x0, in.u_r, in.u_h, m);
        EXPECT_NEAR(whole, cumulative_reward(d, in.x0, r0, h0, m) + cumulative_reward(d, states[k], r1, h1, m),
                    1e-9 * std::max(1.0, std::abs(whole)));
    }
}

TEST(RewardGradient, UnsupportedOnDiscreteDomains) {
    GridworldCollect g(2, 2, {}, 1);
    const auto m = make_reward<GridworldCollect>(GridworldCollect::default_weights(), Agent::robot);
    EXPECT_THROW(reward_gradient(g, g.initial_state({0, 0}, {0, 0}), {Move::stay}, {Move::stay}, m, Agent::robot),
                 UnsupportedOperation);
}

TEST(RewardGradient, ZeroWeightsGiveZeroVector) {
    Rng rng(2);
    const auto in = random_instance(rng, 20);
    const auto d = two_lane_scene(20);
    const RewardModel<DrivingScene> m{in.params, Eigen::VectorXd::Zero(5), Agent::robot};
    EXPECT_EQ(reward_gradient(d, in.x0, in.u_r, in.u_h, m, Agent::robot).norm(), 0.0);
}

TEST(RewardGradient, SpeedFeatureSingleStepByHand) {
    const auto d = two_lane_scene(1);
    DriveState x0{{0.0, 0.0, 0.0, 8.0}, {30.0, 4.0, 0.0, 8.0}, 0};
    const CarControl u{0.2, 1.0};
    const DriverFeatureParams p{0.0, 10.0, 2.0};
    const double w = -1.5;
    const RewardModel<DrivingScene> m{p, driving_weights(0, w, 0, 0, 0), Agent::robot};
    const auto g = reward_gradient(d, x0, {u}, {CarControl{}}, m, Agent::robot);
    // r = w (v0 + a dt - v_des)^2  =>  dr/da = 2 w (v0 + a dt - v_des) dt, dr/dsteer = 0
    const double v1 = 8.0 + 1.0 * 0.1;
    EXPECT_NEAR(g[0], 0.0, 1e-14);
    EXPECT_NEAR(g[1], 2.0 * w * (v1 - 10.0) * 0.1, 1e-12);
}

TEST(RewardGradient, MatchesCentralDifferencesOnRandomInstances) {
    Rng rng(2024);
    const auto d = two_lane_scene(20);
    for (int trial = 0; trial < 100; ++trial) {
        const auto in = random_instance(rng, 20);
        for (Agent owner : {Agent::robot, Agent::human}) {
            const RewardModel<DrivingScene> m{in.params, in.weights, owner};
            for (Agent wrt : {Agent::robot, Agent::human}) {
                const auto g = reward_gradient(d, in.x0, in.u_r, in.u_h, m, wrt);
                const auto f = [&](const Eigen::VectorXd& v) {
                    const auto u = unflatten(v);
                    return wrt == Agent::robot ? cumulative_reward(d, in.x0, u, in.u_h, m)
                                               : cumulative_reward(d, in.x0, in.u_r, u, m);
                };
                const auto fd = finite_difference_gradient(f, flatten(wrt == Agent::robot ? in.u_r : in.u_h), 1e-5);
                EXPECT_LE(gradient_relative_error(g, fd), 1e-4) << "trial " << trial;
            }
        }
    }
}
