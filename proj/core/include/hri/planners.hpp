#pragma once

// Robot decision procedures.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hri/collab.hpp"
#include "hri/driving.hpp"
#include "hri/human_models.hpp"
#include "hri/inference.hpp"
#include "hri/reaching.hpp"
#include "hri/visit_task.hpp"

namespace hri {

enum class PlannerKind {
    fixed,
    reactive,
    predictive,
    stackelberg,
    info_gather,
    t_predictable,
    legible,
    leader_myopic,
    obstacle_baseline,
};

const char* to_string(PlannerKind k);
PlannerKind parse_planner_kind(std::string_view name);

struct PlannerConfig {
    PlannerKind kind = PlannerKind::reactive;
    double lambda = 0.0;           // info_gather
    int t_pred = 0;                // t_predictable
    int theta_target = 0;          // legible
    ContinuousOptions optimizer{};
    int outer_starts = 4;          // stackelberg outer multi-start
    int outer_iterations = 30;     // stackelberg outer quasi-Newton budget
    std::uint64_t seed = 0;

    void validate() const;
};

// ---- collaboration (gridworld) --------------------------------------------

// Robot half of the optimal joint plan from x0, never revised.
ControlSequence<Move> fixed_plan(const CollabSolver& solver, const GridState& x0);

// First robot move of the joint plan re-solved from x_t.
Move reactive_plan(const CollabSolver& solver, const GridState& x_t);

// First robot move of the joint plan computed against the MAP goal of `b`;
// `goals[i]` is the target index belief entry i refers to. Ties in the
// belief go to the lowest entry.
Move predictive_plan(const CollabSolver& solver, const GridState& x_t, const Belief& b, const std::vector<int>& goals);

// Online goal tracker for the predictive planner. The observation segment
// restarts whenever targets get collected; hypotheses are the targets still
// uncollected, with a uniform prior and Laplace-approximate likelihoods.
class GoalTracker {
public:
    GoalTracker(const GridworldCollect& dyn, double beta);

    void reset(const GridState& x);
    // Call after every tick with the new state.
    void observe(const GridState& x);
    const std::vector<int>& goals() const { return goals_; }
    Belief belief() const;

private:
    const GridworldCollect& dyn_;
    double beta_;
    GridState segment_start_;
    int segment_steps_ = 0;
    std::vector<int> goals_;
    Cell current_;
};

// ---- driving --------------------------------------------------------------

struct DrivingPlan {
    ControlSequence<CarControl> robot;
    ControlSequence<CarControl> human;  // predicted human response
    double value = 0.0;                 // planner objective
    bool converged = true;
};

// Zero controls: the human keeps heading and speed.
ControlSequence<CarControl> constant_velocity_prediction(int steps);

// Leader-follower trajectory optimization against a best-responding human
// with known reward. Outer starts: zero controls, warm start, and the robot's
// optimum against a constant-velocity human, then seeded random starts. Each
// outer start is refined by quasi-Newton ascent on R_R(u_R, u_H*(u_R)) with
// the inner best response tracked locally and differentiated through the
// implicit function theorem; the refined plans are finally scored with a
// full multi-start inner best response.
DrivingPlan stackelberg_plan(const DrivingScene& dyn, const DriveState& x0, const RewardModel<DrivingScene>& model_h,
                             const RewardModel<DrivingScene>& model_r, const PlannerConfig& cfg,
                             const ControlSequence<CarControl>* warm_start = nullptr);

// Robot optimum with the human trajectory fixed and unresponsive.
DrivingPlan obstacle_baseline_plan(const DrivingScene& dyn, const DriveState& x0,
                                   const ControlSequence<CarControl>& predicted_u_h,
                                   const RewardModel<DrivingScene>& model_r, const PlannerConfig& cfg,
                                   const ControlSequence<CarControl>* warm_start = nullptr);

// A driving style: reward weights plus feature settings.
struct DrivingStyle {
    std::string label;
    Eigen::VectorXd weights;
    DriverFeatureParams params;

    RewardModel<DrivingScene> model() const { return {params, weights, Agent::human}; }
};

// Finite-candidate interaction model used for style inference: the robot
// picks among `robot_candidates`, the human among `human_candidates`
// (Boltzmann with `beta` under the true style, or best response under an
// assumed style).
struct CandidateGame {
    std::vector<ControlSequence<CarControl>> robot_candidates;
    std::vector<ControlSequence<CarControl>> human_candidates;
    double beta = 1.0;
};

struct CandidateChoice {
    std::size_t robot = 0;
    std::size_t human = 0;  // predicted response under the assumed style
    double value = 0.0;
};

// Reward of every human candidate against a robot sequence.
std::vector<double> human_candidate_rewards(const DrivingScene& dyn, const DriveState& x0,
                                            const ControlSequence<CarControl>& u_r, const CandidateGame& game,
                                            const DrivingStyle& style);

// log P(j | u_R, style) for every human candidate j, one row per style.
std::vector<std::vector<double>> style_log_likelihoods(const DrivingScene& dyn, const DriveState& x0,
                                                       const ControlSequence<CarControl>& u_r,
                                                       const CandidateGame& game,
                                                       const std::vector<DrivingStyle>& styles);

// Stackelberg over the candidate sets: argmax_i R_R(u_R^i, BR(u_R^i; style)).
CandidateChoice stackelberg_candidates(const DrivingScene& dyn, const DriveState& x0, const CandidateGame& game,
                                       const DrivingStyle& assumed, const RewardModel<DrivingScene>& model_r);

// argmax_i R_R(u_R^i, BR(u_R^i; MAP style)) + lambda (H(b) - E H(b')).
CandidateChoice info_gather_plan(const DrivingScene& dyn, const DriveState& x0, const Belief& b, double lambda,
                                 const CandidateGame& game, const std::vector<DrivingStyle>& styles,
                                 const RewardModel<DrivingScene>& model_r);

// Per-candidate objective terms, exposed for inspection and tests.
struct InfoGatherScore {
    double reward = 0.0;
    double info_gain = 0.0;  // H(b) - E H(b')
};
std::vector<InfoGatherScore> info_gather_scores(const DrivingScene& dyn, const DriveState& x0, const Belief& b,
                                                const CandidateGame& game, const std::vector<DrivingStyle>& styles,
                                                const RewardModel<DrivingScene>& model_r);

// ---- communication --------------------------------------------------------

// Observer's log-probability of the remaining visits given the first t:
//   R(order) - log sum over completions c of exp(R(prefix) + R(c)).
double predicted_remainder_logprob(const VisitTask& task, const VisitOrder& order, int t);

// Most efficient visiting order; ties toward the lexicographically first.
VisitOrder reward_optimal_order(const VisitTask& task);

// Order maximizing the remainder probability after t observed visits; ties
// toward higher reward, then lexicographic.
VisitOrder t_predictable_plan(const VisitTask& task, int t);

struct ReachingPlan {
    double offset = 0.0;
    Path2 path;
    double objective = 0.0;  // mean observer posterior on the target over the path
    double midpoint_posterior = 0.0;
    double final_posterior = 0.0;
    double reward = 0.0;  // -cost_weight * length
};

ReachingPlan evaluate_reaching_plan(const ReachingScene& scene, int target, double offset,
                                    const std::vector<double>& prior);

// Shortest candidate to the target; ties toward the earlier offset.
ReachingPlan reaching_reward_optimal_plan(const ReachingScene& scene, int target);

// Candidate maximizing the time-averaged observer posterior on the target;
// ties toward higher reward, then the earlier offset.
ReachingPlan legible_plan(const ReachingScene& scene, int target, const std::vector<double>& prior);

}  // namespace hri
