#include "hri/planners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hri {

const char* to_string(PlannerKind k) {
    switch (k) {
        case PlannerKind::fixed: return "fixed";
        case PlannerKind::reactive: return "reactive";
        case PlannerKind::predictive: return "predictive";
        case PlannerKind::stackelberg: return "stackelberg";
        case PlannerKind::info_gather: return "info-gather";
        case PlannerKind::t_predictable: return "t-predictable";
        case PlannerKind::legible: return "legible";
        case PlannerKind::leader_myopic: return "leader-myopic";
        case PlannerKind::obstacle_baseline: return "obstacle-baseline";
    }
    return "?";
}

PlannerKind parse_planner_kind(std::string_view name) {
    for (PlannerKind k : {PlannerKind::fixed, PlannerKind::reactive, PlannerKind::predictive, PlannerKind::stackelberg,
                          PlannerKind::info_gather, PlannerKind::t_predictable, PlannerKind::legible,
                          PlannerKind::leader_myopic, PlannerKind::obstacle_baseline}) {
        if (name == to_string(k)) return k;
    }
    throw ConfigError("unknown planner kind '" + std::string(name) + "'", "planner/kind");
}

void PlannerConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and >= 0", "planner/lambda");
    if (t_pred < 0) throw ConfigError("t must be >= 0", "planner/t");
    if (theta_target < 0) throw ConfigError("theta_target must be >= 0", "planner/theta_target");
    if (optimizer.starts < 1) throw ConfigError("starts must be >= 1", "planner/optimizer/starts");
    if (optimizer.pieces < 1) throw ConfigError("pieces must be >= 1", "planner/optimizer/pieces");
    if (optimizer.ascent.max_iterations < 0) {
        throw ConfigError("iteration budget must be >= 0", "planner/optimizer/max_iterations");
    }
    if (outer_starts < 1) throw ConfigError("outer_starts must be >= 1", "planner/optimizer/outer_starts");
    if (outer_iterations < 0) throw ConfigError("outer_iterations must be >= 0", "planner/optimizer/outer_iterations");
}

// ---- collaboration ----------------------------------------------------------

ControlSequence<Move> fixed_plan(const CollabSolver& solver, const GridState& x0) {
    return solver.plan(x0).robot;
}

Move reactive_plan(const CollabSolver& solver, const GridState& x_t) {
    const int remaining = solver.domain().horizon().steps - x_t.time_step;
    return solver.first_action(x_t, remaining).robot;
}

Move predictive_plan(const CollabSolver& solver, const GridState& x_t, const Belief& b, const std::vector<int>& goals) {
    if (goals.size() != b.size()) throw ArgumentError("belief is not aligned with the goal list");
    const int remaining = solver.domain().horizon().steps - x_t.time_step;
    return solver.first_action(x_t, remaining, goals[b.map_index()]).robot;
}

GoalTracker::GoalTracker(const GridworldCollect& dyn, double beta) : dyn_(dyn), beta_(beta) {
    if (!(beta > 0.0)) throw ConfigError("beta must be > 0", "planner/beta");
}

void GoalTracker::reset(const GridState& x) {
    segment_start_ = x;
    segment_steps_ = 0;
    current_ = x.human;
    goals_ = dyn_.uncollected(x);
}

void GoalTracker::observe(const GridState& x) {
    if (x.collected != segment_start_.collected) {
        reset(x);
        return;
    }
    ++segment_steps_;
    current_ = x.human;
}

Belief GoalTracker::belief() const {
    if (goals_.empty()) throw DomainError("no uncollected goal to infer");
    const GoalWalk walk{dyn_.width(), dyn_.height(), dyn_.horizon().steps - segment_start_.time_step, beta_};
    std::vector<double> ll;
    ll.reserve(goals_.size());
    for (int g : goals_) {
        ll.push_back(laplace_goal_log_likelihood(walk, segment_start_.human, segment_steps_, current_,
                                                 dyn_.targets()[static_cast<std::size_t>(g)]));
    }
    const Belief prior = Belief::uniform(goals_.size());
    try {
        return belief_update(prior, ll);
    } catch (const InconsistentEvidence&) {
        return prior;  // no goal reachable any more; nothing to infer
    }
}

// ---- driving ----------------------------------------------------------------

ControlSequence<CarControl> constant_velocity_prediction(int steps) {
    if (steps < 1) throw ArgumentError("prediction length must be >= 1");
    return ControlSequence<CarControl>(static_cast<std::size_t>(steps));
}

DrivingPlan obstacle_baseline_plan(const DrivingScene& dyn, const DriveState& x0,
                                   const ControlSequence<CarControl>& predicted_u_h,
                                   const RewardModel<DrivingScene>& model_r, const PlannerConfig& cfg,
                                   const ControlSequence<CarControl>* warm_start) {
    if (predicted_u_h.empty()) throw ArgumentError("human prediction must be non-empty");
    const auto r = optimize_agent(dyn, x0, predicted_u_h, Agent::robot, model_r, cfg.optimizer, warm_start);
    return {r.controls, predicted_u_h, r.value, r.converged};
}

namespace {

double robot_value(const DrivingScene& dyn, const DriveState& x0, const ControlSequence<CarControl>& u_r,
                   const ControlSequence<CarControl>& u_h, const RewardModel<DrivingScene>& m) {
    return dyn.reward_and_gradients(x0, u_r, u_h, m.params, m.owner, m.weights, nullptr, nullptr);
}

}  // namespace

DrivingPlan stackelberg_plan(const DrivingScene& dyn, const DriveState& x0, const RewardModel<DrivingScene>& model_h,
                             const RewardModel<DrivingScene>& model_r, const PlannerConfig& cfg,
                             const ControlSequence<CarControl>* warm_start) {
    const int T = dyn.horizon().steps;
    const PiecewiseControls pc(dyn.bounds(), T, std::min(cfg.optimizer.pieces, T));
    const Eigen::Index n = pc.dim();

    // Local tracking of the inner optimum: one warm-started ascent.
    AscentOptions inner = cfg.optimizer.ascent;
    auto human_grad = [&](const Eigen::VectorXd& z_r, const Eigen::VectorXd& z_h) {
        Eigen::VectorXd gu;
        dyn.reward_and_gradients(x0, pc.decode(z_r), pc.decode(z_h), model_h.params, model_h.owner, model_h.weights,
                                 nullptr, &gu);
        return pc.pull_back(z_h, gu);
    };
    auto local_response = [&](const Eigen::VectorXd& z_r, const Eigen::VectorXd& z_h0) {
        const auto u_r = pc.decode(z_r);
        const Objective fh = [&](const Eigen::VectorXd& z, Eigen::VectorXd* g) {
            Eigen::VectorXd gu;
            const double v = dyn.reward_and_gradients(x0, u_r, pc.decode(z), model_h.params, model_h.owner,
                                                      model_h.weights, nullptr, g ? &gu : nullptr);
            if (g) *g = pc.pull_back(z, gu);
            return v;
        };
        return maximize_bfgs(fh, z_h0, inner).x;
    };

    Eigen::VectorXd z_h_track;
    const double eps = 1e-5;
    const Objective outer = [&](const Eigen::VectorXd& z_r, Eigen::VectorXd* grad) {
        z_h_track = local_response(z_r, z_h_track);
        const auto u_r = pc.decode(z_r);
        const auto u_h = pc.decode(z_h_track);
        Eigen::VectorXd gr, gh;
        const double v = dyn.reward_and_gradients(x0, u_r, u_h, model_r.params, model_r.owner, model_r.weights,
                                                  grad ? &gr : nullptr, grad ? &gh : nullptr);
        if (!grad) return v;
        const Eigen::VectorXd gz_r = pc.pull_back(z_r, gr);
        const Eigen::VectorXd gz_h = pc.pull_back(z_h_track, gh);
        Eigen::MatrixXd H_hh(n, n), H_hr(n, n);
        Eigen::VectorXd zp = z_h_track, zm = z_h_track;
        for (Eigen::Index i = 0; i < n; ++i) {
            zp[i] += eps;
            zm[i] -= eps;
            H_hh.col(i) = (human_grad(z_r, zp) - human_grad(z_r, zm)) / (2 * eps);
            zp[i] = zm[i] = z_h_track[i];
        }
        Eigen::VectorXd rp = z_r, rm = z_r;
        for (Eigen::Index j = 0; j < n; ++j) {
            rp[j] += eps;
            rm[j] -= eps;
            H_hr.col(j) = (human_grad(rp, z_h_track) - human_grad(rm, z_h_track)) / (2 * eps);
            rp[j] = rm[j] = z_r[j];
        }
        const Eigen::MatrixXd neg = -0.5 * (H_hh + H_hh.transpose());
        Eigen::LLT<Eigen::MatrixXd> llt(neg);
        if (llt.info() == Eigen::Success) {
            // dz_h/dz_r = -H_hh^{-1} H_hr = neg^{-1} H_hr
            const Eigen::MatrixXd dzh = llt.solve(H_hr);
            *grad = gz_r + dzh.transpose() * gz_h;
        } else {
            *grad = gz_r;
        }
        return v;
    };

    std::vector<Eigen::VectorXd> starts;
    starts.push_back(pc.zero());
    if (warm_start && static_cast<int>(warm_start->size()) == T) starts.push_back(pc.encode(*warm_start));
    {
        const auto cv = constant_velocity_prediction(T);
        const auto base = optimize_agent(dyn, x0, cv, Agent::robot, model_r, cfg.optimizer, warm_start);
        starts.push_back(pc.encode(base.controls));
    }
    Rng rng(mix_seed(cfg.seed, 0x57ac));
    while (static_cast<int>(starts.size()) < cfg.outer_starts) {
        Eigen::VectorXd z(n);
        for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
        starts.push_back(z);
    }
    starts.resize(static_cast<std::size_t>(cfg.outer_starts));

    AscentOptions outer_opts = cfg.optimizer.ascent;
    outer_opts.max_iterations = cfg.outer_iterations;

    DrivingPlan best;
    best.value = -std::numeric_limits<double>::infinity();
    for (const auto& z0 : starts) {
        const auto u0 = pc.decode(z0);
        const auto br0 = trajectory_best_response(dyn, x0, u0, model_h, cfg.optimizer);
        z_h_track = pc.encode(br0.controls);
        z_h_track = local_response(z0, z_h_track);
        const AscentResult res = maximize_bfgs(outer, z0, outer_opts);
        const auto u_r = pc.decode(res.x);
        const auto tracked = pc.decode(z_h_track);
        const auto br = trajectory_best_response(dyn, x0, u_r, model_h, cfg.optimizer, &tracked);
        const double v = robot_value(dyn, x0, u_r, br.controls, model_r);
        if (v > best.value) {
            best = {u_r, br.controls, v, res.converged && br.converged};
        }
    }
    return best;
}

std::vector<double> human_candidate_rewards(const DrivingScene& dyn, const DriveState& x0,
                                            const ControlSequence<CarControl>& u_r, const CandidateGame& game,
                                            const DrivingStyle& style) {
    if (game.human_candidates.empty()) throw ArgumentError("human candidate set is empty");
    std::vector<double> out;
    out.reserve(game.human_candidates.size());
    for (const auto& u_h : game.human_candidates) {
        out.push_back(dyn.reward_and_gradients(x0, u_r, u_h, style.params, Agent::human, style.weights, nullptr,
                                               nullptr));
    }
    return out;
}

std::vector<std::vector<double>> style_log_likelihoods(const DrivingScene& dyn, const DriveState& x0,
                                                       const ControlSequence<CarControl>& u_r,
                                                       const CandidateGame& game,
                                                       const std::vector<DrivingStyle>& styles) {
    std::vector<std::vector<double>> out;
    out.reserve(styles.size());
    for (const auto& s : styles) {
        out.push_back(boltzmann_log_probabilities(human_candidate_rewards(dyn, x0, u_r, game, s), game.beta));
    }
    return out;
}

namespace {

std::size_t argmax_first(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

}  // namespace

std::vector<InfoGatherScore> info_gather_scores(const DrivingScene& dyn, const DriveState& x0, const Belief& b,
                                                const CandidateGame& game, const std::vector<DrivingStyle>& styles,
                                                const RewardModel<DrivingScene>& model_r) {
    if (game.robot_candidates.empty()) throw ArgumentError("robot candidate set is empty");
    if (styles.size() != b.size()) throw ArgumentError("belief is not aligned with the style set");
    const DrivingStyle& assumed = styles[b.map_index()];
    const double h = entropy(b);
    std::vector<InfoGatherScore> out;
    out.reserve(game.robot_candidates.size());
    for (const auto& u_r : game.robot_candidates) {
        const std::size_t j = argmax_first(human_candidate_rewards(dyn, x0, u_r, game, assumed));
        InfoGatherScore s;
        s.reward = robot_value(dyn, x0, u_r, game.human_candidates[j], model_r);
        s.info_gain = h - expected_posterior_entropy(b, style_log_likelihoods(dyn, x0, u_r, game, styles));
        out.push_back(s);
    }
    return out;
}

CandidateChoice stackelberg_candidates(const DrivingScene& dyn, const DriveState& x0, const CandidateGame& game,
                                       const DrivingStyle& assumed, const RewardModel<DrivingScene>& model_r) {
    if (game.robot_candidates.empty()) throw ArgumentError("robot candidate set is empty");
    CandidateChoice best;
    best.value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < game.robot_candidates.size(); ++i) {
        const auto& u_r = game.robot_candidates[i];
        const std::size_t j = argmax_first(human_candidate_rewards(dyn, x0, u_r, game, assumed));
        const double v = robot_value(dyn, x0, u_r, game.human_candidates[j], model_r);
        if (v > best.value) best = {i, j, v};
    }
    return best;
}

CandidateChoice info_gather_plan(const DrivingScene& dyn, const DriveState& x0, const Belief& b, double lambda,
                                 const CandidateGame& game, const std::vector<DrivingStyle>& styles,
                                 const RewardModel<DrivingScene>& model_r) {
    if (!(lambda >= 0.0)) throw ArgumentError("lambda must be >= 0");
    const DrivingStyle& assumed = styles.at(b.map_index());
    const auto scores = info_gather_scores(dyn, x0, b, game, styles, model_r);
    CandidateChoice best;
    best.value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double v = scores[i].reward + lambda * scores[i].info_gain;
        if (v > best.value) {
            const std::size_t j =
                argmax_first(human_candidate_rewards(dyn, x0, game.robot_candidates[i], game, assumed));
            best = {i, j, v};
        }
    }
    return best;
}

// ---- communication ----------------------------------------------------------

namespace {

// log sum over orderings of the targets outside `mask`, starting at `from`
// (index n = the start point), of exp(-w * path length).
class CompletionTable {
public:
    explicit CompletionTable(const VisitTask& task) : task_(task), n_(task.size()) {
        table_.assign(static_cast<std::size_t>(1 << n_) * static_cast<std::size_t>(n_ + 1),
                      std::numeric_limits<double>::quiet_NaN());
    }

    double operator()(unsigned mask, int from) {
        const unsigned full = (1u << n_) - 1u;
        if (mask == full) return 0.0;
        double& slot = table_[mask * static_cast<unsigned>(n_ + 1) + static_cast<unsigned>(from)];
        if (!std::isnan(slot)) return slot;
        const Point2 p = from == n_ ? task_.start : task_.targets[static_cast<std::size_t>(from)];
        std::vector<double> terms;
        for (int j = 0; j < n_; ++j) {
            if (mask & (1u << j)) continue;
            terms.push_back(-task_.weight * distance(p, task_.targets[static_cast<std::size_t>(j)]) +
                            (*this)(mask | (1u << j), j));
        }
        slot = logsumexp(terms);
        return slot;
    }

private:
    const VisitTask& task_;
    int n_;
    std::vector<double> table_;
};

}  // namespace

double predicted_remainder_logprob(const VisitTask& task, const VisitOrder& order, int t) {
    task.validate();
    task.check_order(order);
    if (t < 0 || t >= task.size()) throw ArgumentError("t must be in [0, number of targets)");
    CompletionTable table(task);
    unsigned mask = 0;
    for (int i = 0; i < t; ++i) mask |= 1u << order[static_cast<std::size_t>(i)];
    const int last = t == 0 ? task.size() : order[static_cast<std::size_t>(t - 1)];
    const double prefix =
        task.reward(std::span<const int>(order.data(), static_cast<std::size_t>(t)));
    return task.reward(order) - (prefix + table(mask, last));
}

VisitOrder reward_optimal_order(const VisitTask& task) {
    const auto orders = all_orders(task);
    std::size_t best = 0;
    double best_r = task.reward(orders[0]);
    for (std::size_t i = 1; i < orders.size(); ++i) {
        const double r = task.reward(orders[i]);
        if (r > best_r) {
            best_r = r;
            best = i;
        }
    }
    return orders[best];
}

VisitOrder t_predictable_plan(const VisitTask& task, int t) {
    const auto orders = all_orders(task);
    std::size_t best = 0;
    double best_lp = predicted_remainder_logprob(task, orders[0], t);
    double best_r = task.reward(orders[0]);
    for (std::size_t i = 1; i < orders.size(); ++i) {
        const double lp = predicted_remainder_logprob(task, orders[i], t);
        const double r = task.reward(orders[i]);
        if (lp > best_lp || (lp == best_lp && r > best_r)) {
            best = i;
            best_lp = lp;
            best_r = r;
        }
    }
    return orders[best];
}

ReachingPlan evaluate_reaching_plan(const ReachingScene& scene, int target, double offset,
                                    const std::vector<double>& prior) {
    scene.validate();
    if (target < 0 || target >= static_cast<int>(scene.goals.size())) throw ArgumentError("unknown target goal");
    ReachingPlan p;
    p.offset = offset;
    p.path = bezier_path(scene.start, scene.goals[static_cast<std::size_t>(target)], offset, scene.waypoints);
    p.reward = -scene.cost_weight * path_length(p.path);
    double sum = 0.0;
    for (int k = 1; k <= scene.waypoints; ++k) {
        const double post = goal_posterior(scene, p.path, k, prior)[static_cast<std::size_t>(target)];
        sum += post;
        if (k == scene.waypoints / 2) p.midpoint_posterior = post;
        if (k == scene.waypoints) p.final_posterior = post;
    }
    p.objective = sum / scene.waypoints;
    return p;
}

ReachingPlan reaching_reward_optimal_plan(const ReachingScene& scene, int target) {
    const std::vector<double> prior(scene.goals.size(), 1.0 / static_cast<double>(scene.goals.size()));
    ReachingPlan best = evaluate_reaching_plan(scene, target, scene.offsets.front(), prior);
    for (std::size_t i = 1; i < scene.offsets.size(); ++i) {
        ReachingPlan p = evaluate_reaching_plan(scene, target, scene.offsets[i], prior);
        if (p.reward > best.reward) best = std::move(p);
    }
    return best;
}

ReachingPlan legible_plan(const ReachingScene& scene, int target, const std::vector<double>& prior) {
    ReachingPlan best = evaluate_reaching_plan(scene, target, scene.offsets.front(), prior);
    for (std::size_t i = 1; i < scene.offsets.size(); ++i) {
        ReachingPlan p = evaluate_reaching_plan(scene, target, scene.offsets[i], prior);
        if (p.objective > best.objective || (p.objective == best.objective && p.reward > best.reward)) {
            best = std::move(p);
        }
    }
    return best;
}

}  // namespace hri
