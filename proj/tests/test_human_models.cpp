#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "fixtures.hpp"
#include "hri/human_models.hpp"
#include "hri/peakworld.hpp"

using namespace hri;
using namespace hri::testing;

namespace {

double prob_sum(const std::vector<double>& lp) {
    double s = 0.0;
    for (double v : lp) s += std::exp(v);
    return s;
}

}  // namespace

// ---- Boltzmann ---------------------------------------------------------------

TEST(Boltzmann, EqualRewardsGiveUniform) {
    const std::vector<double> r{2.0, 2.0, 2.0, 2.0};
    for (double lp : boltzmann_log_probabilities(r, 3.0)) EXPECT_NEAR(std::exp(lp), 0.25, 1e-15);
}

TEST(Boltzmann, ZeroBetaGivesUniform) {
    const std::vector<double> r{-5.0, 0.0, 7.0};
    for (double lp : boltzmann_log_probabilities(r, 0.0)) EXPECT_NEAR(std::exp(lp), 1.0 / 3.0, 1e-15);
}

TEST(Boltzmann, TwoCandidatesClosedForm) {
    const std::vector<double> r{1.0, 0.0};
    const auto lp = boltzmann_log_probabilities(r, 1.0);
    EXPECT_NEAR(std::exp(lp[0]), std::exp(1.0) / (1.0 + std::exp(1.0)), 1e-15);
    EXPECT_NEAR(boltzmann_log_likelihood(r, 1, 1.0), -std::log1p(std::exp(1.0)), 1e-14);
}

TEST(Boltzmann, HugeRewardsDoNotOverflow) {
    const std::vector<double> r{1e6, 1e6 - 1.0};
    const auto lp = boltzmann_log_probabilities(r, 1.0);
    EXPECT_TRUE(std::isfinite(lp[0]) && std::isfinite(lp[1]));
    EXPECT_NEAR(std::exp(lp[0]), 1.0 / (1.0 + std::exp(-1.0)), 1e-9);
}

TEST(Boltzmann, RejectsEmptyAndNegativeBeta) {
    EXPECT_THROW(boltzmann_log_probabilities({}, 1.0), ArgumentError);
    const std::vector<double> r{1.0};
    EXPECT_THROW(boltzmann_log_probabilities(r, -1.0), ArgumentError);
    EXPECT_THROW(boltzmann_log_likelihood(r, 1, 1.0), ArgumentError);
}

TEST(Boltzmann, NormalizedAndMonotoneOnRandomSets) {
    Rng rng(41);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 1 + rng.next_u64() % 12;
        std::vector<double> r(n);
        for (double& v : r) v = 200.0 * (rng.uniform() - 0.5);
        const double beta = 5.0 * rng.uniform();
        const auto lp = boltzmann_log_probabilities(r, beta);
        ASSERT_NEAR(prob_sum(lp), 1.0, 1e-9);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (r[i] > r[j]) {
                    ASSERT_GE(lp[i], lp[j]);
                }
            }
        }
    }
}

TEST(Boltzmann, SharpensWithBeta) {
    const std::vector<double> r{1.0, 0.5, 0.0};
    double last = 0.0;
    for (double beta : {0.0, 0.5, 1.0, 2.0, 8.0, 32.0}) {
        const double p = std::exp(boltzmann_log_probabilities(r, beta)[0]);
        EXPECT_GE(p, last);
        last = p;
    }
    EXPECT_GT(last, 0.999);
}

TEST(Boltzmann, SampleFrequenciesMatchProbabilities) {
    const std::vector<double> r{0.0, 1.0, 2.0};
    const auto lp = boltzmann_log_probabilities(r, 1.0);
    Rng rng(12);
    std::vector<int> counts(3, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[boltzmann_sample(r, 1.0, rng)];
    for (std::size_t i = 0; i < 3; ++i) {
        const double p = std::exp(lp[i]);
        // 5 standard errors
        EXPECT_NEAR(counts[i] / double(n), p, 5.0 * std::sqrt(p * (1 - p) / n));
    }
}

// ---- discrete best response ---------------------------------------------------

namespace {

// Oracle: backward induction over the human's moves with the robot
// sequence fixed.
double peak_br_oracle(const PeakWorld& w, const PeakState& x, const ControlSequence<Move>& u_r, std::size_t t,
                      const RewardModel<PeakWorld>& m) {
    if (t == u_r.size()) return 0.0;
    double best = -1e300;
    for (Move a : kMoves) {
        best = std::max(best, step_reward(w, x, u_r[t], a, m) + peak_br_oracle(w, w.step(x, u_r[t], a), u_r, t + 1, m));
    }
    return best;
}

}  // namespace

TEST(DiscreteBestResponse, MatchesBackwardInductionOnPeakWorld) {
    Rng rng(6);
    for (int trial = 0; trial < 30; ++trial) {
        PeakWorld w(4, 3, {{3, 1}, {0, 2}}, 5);
        Eigen::Vector2d theta(2.0 * rng.uniform() - 0.5, 2.0 * rng.uniform() - 0.5);
        const auto m = make_reward<PeakWorld>(theta, Agent::human);
        const auto x0 = w.initial_state({static_cast<int>(rng.next_u64() % 4), static_cast<int>(rng.next_u64() % 3)});
        const ControlSequence<Move> u_r(5, Move::stay);
        const auto br = trajectory_best_response(w, x0, u_r, m);
        EXPECT_NEAR(br.value, peak_br_oracle(w, x0, u_r, 0, m), 1e-12);
        EXPECT_NEAR(cumulative_reward(w, x0, u_r, br.controls, m), br.value, 1e-12);
    }
}

TEST(DiscreteBestResponse, TiesGoToLexicographicallyFirst) {
    PeakWorld w(3, 3, {{0, 0}}, 2);
    const auto m = make_reward<PeakWorld>(Eigen::VectorXd::Zero(1), Agent::human);
    const auto br = trajectory_best_response(w, w.initial_state({1, 1}), {Move::stay, Move::stay}, m);
    EXPECT_EQ(br.controls, (ControlSequence<Move>{Move::stay, Move::stay}));
}

TEST(DiscreteBestResponse, ExhaustiveLimitIsConfigError) {
    PeakWorld w(3, 3, {{0, 0}}, 12);
    EXPECT_THROW(enumerate_sequences(w, Agent::human, 12), ConfigError);
    EXPECT_EQ(enumerate_sequences(w, Agent::human, 2).size(), 25u);
}

TEST(MyopicResponse, StepsOntoAdjacentPeak) {
    PeakWorld w(3, 3, {{2, 1}}, 3);
    const auto m = make_reward<PeakWorld>(Eigen::VectorXd::Constant(1, 1.0), Agent::human);
    EXPECT_EQ(myopic_response(w, w.initial_state({1, 1}), Move::stay, m), Move::right);
    // Nothing in reach: first canonical action.
    EXPECT_EQ(myopic_response(w, w.initial_state({0, 0}), Move::stay, m), Move::stay);
}

// ---- continuous best response ----------------------------------------------------

TEST(ContinuousBestResponse, NoWorseThanConstantControlGrid) {
    const auto d = two_lane_scene(5);
    Rng rng(19);
    ContinuousOptions opts;
    opts.pieces = 5;
    opts.starts = 8;
    opts.ascent.max_iterations = 200;
    for (int trial = 0; trial < 10; ++trial) {
        auto in = random_instance(rng, 5);
        in.weights = driving_weights(1.0, -0.5 * rng.uniform(), -20.0 * rng.uniform(), -5.0, 2.0 * rng.uniform());
        const RewardModel<DrivingScene> m{in.params, in.weights, Agent::human};
        const auto br = trajectory_best_response(d, in.x0, in.u_r, m, opts);
        EXPECT_NEAR(cumulative_reward(d, in.x0, in.u_r, br.controls, m), br.value, 1e-9);
        double grid = -1e300;
        for (int i = 0; i <= 10; ++i) {
            for (int j = 0; j <= 10; ++j) {
                const CarControl u{-0.99 + 1.98 * i / 10.0, -5.95 + 8.9 * j / 10.0};
                grid = std::max(grid, cumulative_reward(d, in.x0, in.u_r, ControlSequence<CarControl>(5, u), m));
            }
        }
        EXPECT_GE(br.value, grid - 1e-6) << "trial " << trial;
    }
}

TEST(ContinuousBestResponse, ControlsStayInBounds) {
    const auto d = two_lane_scene(8);
    Rng rng(20);
    const auto in = random_instance(rng, 8);
    const RewardModel<DrivingScene> m{in.params, driving_weights(1, -1, -10, -5, 5), Agent::human};
    const auto br = trajectory_best_response(d, in.x0, in.u_r, m, ContinuousOptions{});
    ASSERT_EQ(br.controls.size(), 8u);
    for (const auto& u : br.controls) EXPECT_NO_THROW(d.check_control(u, Agent::human));
}

TEST(PiecewiseControls, DecodeEncodeRoundTripAndPullBack) {
    const PiecewiseControls pc(ControlBounds{}, 10, 4);
    Rng rng(4);
    Eigen::VectorXd z(pc.dim());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    const auto u = pc.decode(z);
    EXPECT_LE((pc.encode(u) - z).norm(), 1e-9);
    // pull_back is the chain rule of decode: check with a linear functional.
    Eigen::VectorXd a(20);
    for (Eigen::Index i = 0; i < 20; ++i) a[i] = rng.normal();
    const auto f = [&](const Eigen::VectorXd& zz) { return a.dot(flatten(pc.decode(zz))); };
    EXPECT_LE((pc.pull_back(z, a) - finite_difference_gradient(f, z)).norm(), 1e-7);
}

// ---- goal-directed walker ----------------------------------------------------------

TEST(GoalDirectedWalker, SoftValuesZeroAtGoalAndDecreasingWithDistance) {
    GoalDirectedWalker w(5, 5, 2.0);
    const Cell goal{4, 4};
    const auto& v = w.soft_values(goal);
    EXPECT_EQ(v[4 * 5 + 4], 0.0);
    for (int y = 0; y < 5; ++y) {
        for (int x = 0; x < 5; ++x) {
            // A soft maximum is at least the hard one.
            EXPECT_GE(v[static_cast<std::size_t>(y * 5 + x)], -manhattan({x, y}, goal) - 1e-12);
        }
    }
    EXPECT_GT(v[3 * 5 + 4], v[0]);
}

TEST(GoalDirectedWalker, MoveDistributionPrefersApproach) {
    GoalDirectedWalker w(5, 5, 2.0);
    const auto lw = w.move_log_weights({0, 0}, {4, 4});
    const auto p = softmax(lw);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    // up and right approach; stay, down and left do not
    EXPECT_GT(p[1], p[0]);
    EXPECT_GT(p[4], p[0]);
    EXPECT_NEAR(p[1], p[4], 1e-12);
}

TEST(GoalDirectedWalker, GoalFrequenciesFollowDistance) {
    GoalDirectedWalker w(6, 6, 1.0);
    const std::vector<Cell> goals{{1, 0}, {0, 3}};
    Rng rng(8);
    int first = 0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) first += w.sample_goal({0, 0}, goals, rng) == 0;
    const double p = 1.0 / (1.0 + std::exp(-2.0));
    EXPECT_NEAR(first / double(n), p, 5.0 * std::sqrt(p * (1 - p) / n));
}

TEST(GoalDirectedWalker, ReachesGoalOnAverage) {
    GoalDirectedWalker w(5, 5, 3.0);
    Rng rng(10);
    int reached = 0;
    for (int trial = 0; trial < 200; ++trial) {
        Cell c{0, 0};
        for (int t = 0; t < 20 && c != Cell{4, 4}; ++t) c = apply_move(c, w.sample_move(c, {4, 4}, rng), 5, 5);
        reached += c == Cell{4, 4};
    }
    EXPECT_GT(reached, 190);
}

TEST(HumanKind, NamesRoundTrip) {
    for (auto k : {HumanKind::perfect_collaborator, HumanKind::myopic, HumanKind::best_response, HumanKind::boltzmann,
                   HumanKind::scripted}) {
        EXPECT_EQ(parse_human_kind(to_string(k)), k);
    }
    EXPECT_THROW(parse_human_kind("oracle"), ConfigError);
}
