#include <benchmark/benchmark.h>

#include <filesystem>

#include "hri/harness.hpp"
#include "hri/planners.hpp"
#include "hri/scenario.hpp"

using namespace hri;

namespace {

std::filesystem::path scenario(const char* name) { return std::filesystem::path(HRIGAME_SCENARIO_DIR) / name; }

DrivingScene scene(int T) { return DrivingScene(Road{{0.0, 4.0}, 4.0}, ControlBounds{}, 20.0, Horizon{T, 0.1}); }

Eigen::VectorXd weights() {
    Eigen::VectorXd w(5);
    w << 2.0, -1.0, -50.0, -10.0, 1.0;
    return w;
}

}  // namespace

static void BM_CollabSolverValue(benchmark::State& state) {
    const Scenario sc = load_scenario(scenario("collab-reactive.json"));
    const auto& g = sc.grid();
    GridworldCollect dyn(g.width, g.height, g.targets, g.horizon);
    const auto x0 = dyn.initial_state(g.robot, g.human);
    for (auto _ : state) {
        CollabSolver solver(dyn, g.weights);
        benchmark::DoNotOptimize(solver.value(x0, g.horizon));
    }
}
BENCHMARK(BM_CollabSolverValue)->Unit(benchmark::kMillisecond);

// One robot decision per iteration in a live gridworld episode.
static void BM_GridworldTick(benchmark::State& state) {
    const char* files[] = {"collab-fixed.json", "collab-reactive.json", "collab-predictive.json"};
    const Scenario sc = load_scenario(scenario(files[state.range(0)]));
    auto ep = make_episode(sc, 0);
    for (auto _ : state) {
        if (ep->done()) {
            state.PauseTiming();
            ep = make_episode(sc, 0);
            state.ResumeTiming();
        }
        benchmark::DoNotOptimize(ep->advance());
    }
}
BENCHMARK(BM_GridworldTick)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);

static void BM_RewardGradient(benchmark::State& state) {
    const int T = static_cast<int>(state.range(0));
    const auto d = scene(T);
    const DriveState x0{{0, 4, 0, 10}, {-2, 0, 0, 10}, 0};
    const ControlSequence<CarControl> u(static_cast<std::size_t>(T), CarControl{0.01, 0.5});
    const RewardModel<DrivingScene> m{{0.0, 10.0, 2.0}, weights(), Agent::human};
    for (auto _ : state) benchmark::DoNotOptimize(reward_gradient(d, x0, u, u, m, Agent::robot));
}
BENCHMARK(BM_RewardGradient)->Arg(10)->Arg(20)->Arg(40);

static void BM_ContinuousBestResponse(benchmark::State& state) {
    const auto d = scene(20);
    const DriveState x0{{0, 4, 0, 10}, {-2, 0, 0, 10}, 0};
    const ControlSequence<CarControl> u_r(20, CarControl{-0.05, 0.5});
    const RewardModel<DrivingScene> m{{0.0, 10.0, 2.0}, weights(), Agent::human};
    ContinuousOptions opts;
    opts.pieces = 4;
    opts.starts = 4;
    for (auto _ : state) benchmark::DoNotOptimize(trajectory_best_response(d, x0, u_r, m, opts));
}
BENCHMARK(BM_ContinuousBestResponse)->Unit(benchmark::kMillisecond);

static void BM_StackelbergPlan(benchmark::State& state) {
    const auto d = scene(10);
    const DriveState x0{{0, 4, 0, 10}, {-2, 0, 0, 10}, 0};
    const RewardModel<DrivingScene> mr{{0.0, 10.0, 2.0}, weights(), Agent::robot};
    const RewardModel<DrivingScene> mh{{0.0, 10.0, 2.0}, weights(), Agent::human};
    PlannerConfig cfg;
    cfg.kind = PlannerKind::stackelberg;
    cfg.optimizer.pieces = 2;
    cfg.optimizer.starts = 2;
    cfg.outer_starts = 2;
    cfg.outer_iterations = 10;
    for (auto _ : state) benchmark::DoNotOptimize(stackelberg_plan(d, x0, mh, mr, cfg));
}
BENCHMARK(BM_StackelbergPlan)->Unit(benchmark::kMillisecond);

static void BM_InfoGatherPlan(benchmark::State& state) {
    const Scenario sc = load_scenario(scenario("braking-info-gather.json"));
    const auto& dspec = sc.driving();
    DrivingScene d(dspec.road, dspec.bounds, dspec.v_max, Horizon{dspec.horizon, dspec.dt});
    const DriveState x0{dspec.robot, dspec.human, 0};
    const CandidateGame game{sc.planner.candidates, sc.human.candidates, sc.human.beta};
    const RewardModel<DrivingScene> mr{dspec.robot_reward.params, dspec.robot_reward.weights, Agent::robot};
    const Belief b = Belief::uniform(sc.human.styles.size());
    for (auto _ : state) {
        benchmark::DoNotOptimize(info_gather_plan(d, x0, b, sc.planner.config.lambda, game, sc.human.styles, mr));
    }
}
BENCHMARK(BM_InfoGatherPlan)->Unit(benchmark::kMicrosecond);

static void BM_BeliefUpdate(benchmark::State& state) {
    Belief b = Belief::uniform(static_cast<std::size_t>(state.range(0)));
    std::vector<double> ll(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < ll.size(); ++i) ll[i] = -0.1 * static_cast<double>(i);
    for (auto _ : state) {
        b = belief_update(b, ll);
        if (b.map_index() != 0) b = Belief::uniform(ll.size());
        benchmark::DoNotOptimize(b);
    }
}
BENCHMARK(BM_BeliefUpdate)->Arg(2)->Arg(16)->Arg(256);

static void BM_RunEpisodeHandover(benchmark::State& state) {
    const Scenario sc = load_scenario(scenario("handover-leader.json"));
    for (auto _ : state) benchmark::DoNotOptimize(run_episode(sc, 0).to_jsonl());
}
BENCHMARK(BM_RunEpisodeHandover)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
