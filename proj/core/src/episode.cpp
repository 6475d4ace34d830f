#include "hri/episode.hpp"

#include <cmath>

namespace hri {

json metrics_to_json(const MetricsRow& m) {
    json j{{"scenario", m.scenario},
           {"condition", m.condition},
           {"seed", m.seed},
           {"completion_time", m.completion_time},
           {"robot_return", m.robot_return},
           {"human_return", m.human_return},
           {"belief_entropy_trace", m.belief_entropy_trace},
           {"posterior_on_truth", m.posterior_on_truth},
           {"prediction_accuracy", m.prediction_accuracy ? json(*m.prediction_accuracy) : json()},
           {"extra", m.extra}};
    return j;
}

MetricsRow metrics_from_json(const json& j) {
    MetricsRow m;
    try {
        m.scenario = j.at("scenario").get<std::string>();
        m.condition = j.at("condition").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.completion_time = j.at("completion_time").get<double>();
        m.robot_return = j.at("robot_return").get<double>();
        m.human_return = j.at("human_return").get<double>();
        m.belief_entropy_trace = j.at("belief_entropy_trace").get<std::vector<double>>();
        m.posterior_on_truth = j.at("posterior_on_truth").get<std::vector<double>>();
        if (!j.at("prediction_accuracy").is_null()) m.prediction_accuracy = j.at("prediction_accuracy").get<double>();
        m.extra = j.at("extra").get<std::map<std::string, double>>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed metrics record: ") + e.what());
    }
    return m;
}

json Episode::header() const {
    return json{{"type", "header"},
                {"schema_version", kLogSchemaVersion},
                {"scenario", scenario_.id},
                {"seed", seed_},
                {"config", scenario_.config},
                {"initial_state", initial_state()}};
}

namespace {

json belief_json(const Belief& b) { return json(b.probabilities()); }


// ---------------------------------------------------------------------------
// Gridworld collaboration

class GridEpisode final : public Episode {
public:
    GridEpisode(const Scenario& sc, std::uint64_t seed)
        : Episode(sc, seed),
          dyn_(sc.grid().width, sc.grid().height, sc.grid().targets, sc.grid().horizon),
          model_(make_reward<GridworldCollect>(sc.grid().weights, Agent::robot)),
          solver_(dyn_, sc.grid().weights),
          tracker_(dyn_, sc.planner.inference_beta),
          human_rng_(mix_seed(seed, 1)) {
        x_ = dyn_.initial_state(sc.grid().robot, sc.grid().human);
        x0_ = x_;
        tracker_.reset(x_);
        if (sc.human.kind == HumanKind::boltzmann) {
            walker_.emplace(dyn_.width(), dyn_.height(), sc.human.beta);
            pick_goal();
        }
        if (sc.planner.config.kind == PlannerKind::fixed) fixed_ = fixed_plan(solver_, x_);
        m_.scenario = sc.id;
        m_.condition = to_string(sc.planner.config.kind);
        m_.seed = seed;
        if (dyn_.all_collected(x_)) completion_ = 0;
    }

    int tick() const override { return x_.time_step; }
    bool done() const override { return dyn_.all_collected(x_) || x_.time_step >= dyn_.horizon().steps; }
    json state() const override { return x_; }

    json legal_human_actions() const override {
        json out = json::array();
        for (Move m : kMoves) {
            if (m == Move::stay || apply_move(x_.human, m, dyn_.width(), dyn_.height()) != x_.human) {
                out.push_back(to_string(m));
            }
        }
        return out;
    }

    json belief() const override {
        if (tracker_.goals().empty()) return nullptr;
        return json{{"goals", tracker_.goals()}, {"p", belief_json(tracker_.belief())}};
    }

    json robot_plan() override {
        if (!pending_) {
            switch (scenario_.planner.config.kind) {
                case PlannerKind::fixed:
                    pending_ = fixed_[static_cast<std::size_t>(x_.time_step)];
                    break;
                case PlannerKind::predictive:
                    pending_ = tracker_.goals().empty()
                                   ? reactive_plan(solver_, x_)
                                   : predictive_plan(solver_, x_, tracker_.belief(), tracker_.goals());
                    break;
                default:
                    pending_ = reactive_plan(solver_, x_);
                    break;
            }
        }
        return json{{"robot", to_string(*pending_)}};
    }

    json advance(const json* human_action) override {
        if (done()) throw ArgumentError("episode is over");
        Move u_h = Move::stay;
        if (human_action) {
            u_h = parse_action(*human_action);
        } else {
            switch (scenario_.human.kind) {
                case HumanKind::scripted: {
                    const json& acts = scenario_.human.actions;
                    const auto t = static_cast<std::size_t>(x_.time_step);
                    if (t < acts.size()) {
                        try {
                            u_h = parse_action(acts[t]);
                        } catch (const ArgumentError& e) {
                            throw ConfigError(e.what(), "/human/actions/" + std::to_string(t));
                        }
                    }
                    break;
                }
                case HumanKind::boltzmann:
                    u_h = walker_->sample_move(x_.human, dyn_.targets()[static_cast<std::size_t>(goal_)], human_rng_);
                    break;
                case HumanKind::myopic:
                    robot_plan();
                    u_h = myopic_response(dyn_, x_, *pending_, model_);
                    break;
                case HumanKind::perfect_collaborator:
                    u_h = solver_.first_action(x_, dyn_.horizon().steps - x_.time_step).human;
                    break;
                case HumanKind::best_response:
                    throw ConfigError("unsupported human kind for gridworld", "/human/kind");
            }
        }
        robot_plan();
        const Move u_r = *pending_;
        return apply(u_r, u_h, human_action ? -1 : goal_, true);
    }

    json reapply(const json& logged) override {
        if (done()) throw FormatError("log continues past the end of the episode");
        const Move u_r = parse_move(logged.at("u_r").get<std::string>());
        const Move u_h = parse_move(logged.at("u_h").get<std::string>());
        const json& aux = logged.at("aux");
        const int truth = aux.contains("human_goal") ? aux.at("human_goal").get<int>() : -1;
        return apply(u_r, u_h, truth, false);
    }

    MetricsRow metrics() const override {
        MetricsRow m = m_;
        m.completion_time = completion_ >= 0 ? completion_ : dyn_.horizon().steps;
        if (predictions_ > 0) m.prediction_accuracy = static_cast<double>(correct_) / predictions_;
        m.extra["collected"] = dyn_.targets().size() - static_cast<std::size_t>(dyn_.uncollected_count(x_));
        return m;
    }

protected:
    json initial_state() const override { return x0_; }

private:
    Move parse_action(const json& a) const {
        if (!a.is_string()) throw ArgumentError("gridworld action must be a move name");
        const Move m = parse_move(a.get<std::string>());
        if (m != Move::stay && apply_move(x_.human, m, dyn_.width(), dyn_.height()) == x_.human) {
            throw ArgumentError(std::string("move '") + to_string(m) + "' leaves the grid");
        }
        return m;
    }

    void pick_goal() {
        const auto open = dyn_.uncollected(x_);
        if (open.empty()) {
            goal_ = -1;
            return;
        }
        std::vector<Cell> cells;
        for (int i : open) cells.push_back(dyn_.targets()[static_cast<std::size_t>(i)]);
        goal_ = open[walker_->sample_goal(x_.human, cells, human_rng_)];
    }

    json apply(Move u_r, Move u_h, int truth, bool simulate) {
        json aux = json::object();
        if (truth >= 0) aux["human_goal"] = truth;
        if (!tracker_.goals().empty()) {
            const Belief pre = tracker_.belief();
            const auto& goals = tracker_.goals();
            aux["map_goal"] = goals[pre.map_index()];
            for (std::size_t i = 0; i < goals.size(); ++i) {
                if (goals[i] == truth) {
                    m_.posterior_on_truth.push_back(pre[i]);
                    ++predictions_;
                    if (pre.map_index() == i) ++correct_;
                }
            }
        }
        const double r = step_reward(dyn_, x_, u_r, u_h, model_);
        m_.robot_return += r;
        m_.human_return += r;
        x_ = dyn_.step(x_, u_r, u_h);
        tracker_.observe(x_);
        pending_.reset();
        if (completion_ < 0 && dyn_.all_collected(x_)) completion_ = x_.time_step;
        if (simulate && walker_ && goal_ >= 0 && (x_.collected & (1u << goal_))) pick_goal();

        json b = belief();
        if (!b.is_null()) m_.belief_entropy_trace.push_back(entropy(Belief(b.at("p").get<std::vector<double>>())));
        return json{{"type", "tick"},
                    {"t", x_.time_step - 1},
                    {"u_r", to_string(u_r)},
                    {"u_h", to_string(u_h)},
                    {"state", x_},
                    {"rewards", {{"robot", r}, {"human", r}}},
                    {"belief", b},
                    {"aux", aux}};
    }

    GridworldCollect dyn_;
    RewardModel<GridworldCollect> model_;
    CollabSolver solver_;
    GoalTracker tracker_;
    std::optional<GoalDirectedWalker> walker_;
    Rng human_rng_;
    GridState x_;
    GridState x0_;
    ControlSequence<Move> fixed_;
    int goal_ = -1;
    std::optional<Move> pending_;
    int completion_ = -1;
    int predictions_ = 0;
    int correct_ = 0;
    MetricsRow m_;
};

// ---------------------------------------------------------------------------
// Driving

class DrivingEpisode final : public Episode {
public:
    DrivingEpisode(const Scenario& sc, std::uint64_t seed)
        : Episode(sc, seed),
          spec_(scenario_.driving()),
          dyn_(spec_.road, spec_.bounds, spec_.v_max, Horizon{spec_.horizon, spec_.dt}),
          robot_model_{spec_.robot_reward.params, spec_.robot_reward.weights, Agent::robot},
          human_rng_(mix_seed(seed, 1)) {
        Rng init(mix_seed(seed, 3));
        auto jitter = [&](double half) { return half > 0.0 ? (2.0 * init.uniform() - 1.0) * half : 0.0; };
        x_ = DriveState{spec_.robot, spec_.human, 0};
        x_.human.x += jitter(spec_.jitter_human_x);
        x_.human.speed = std::clamp(x_.human.speed + jitter(spec_.jitter_human_speed), 0.0, spec_.v_max);
        x_.robot.x += jitter(spec_.jitter_robot_x);
        x0_ = x_;
        const auto& styles = sc.human.styles;
        if (styles.size() > 1) {
            Rng pick(mix_seed(seed, 4));
            truth_ = static_cast<int>(pick.categorical(sc.human.prior));
        } else {
            truth_ = styles.empty() ? -1 : 0;
        }
        if (!styles.empty()) belief_ = Belief(sc.human.prior);
        game_.robot_candidates = sc.planner.candidates;
        game_.human_candidates = sc.human.candidates;
        game_.beta = sc.human.beta;
        m_.scenario = sc.id;
        m_.condition = to_string(sc.planner.config.kind);
        m_.seed = seed;
    }

    int tick() const override { return x_.time_step; }
    bool done() const override { return x_.time_step >= spec_.ticks; }
    json state() const override { return x_; }

    json legal_human_actions() const override {
        return json{{"steer", {-spec_.bounds.steer_max, spec_.bounds.steer_max}},
                    {"accel", {spec_.bounds.accel_min, spec_.bounds.accel_max}}};
    }

    json belief() const override {
        if (belief_.size() == 0) return nullptr;
        json labels = json::array();
        for (const auto& s : scenario_.human.styles) labels.push_back(s.label);
        return json{{"styles", labels}, {"p", belief_json(belief_)}};
    }

    json robot_plan() override {
        if (!plan_) plan_ = compute_plan();
        return json{{"robot", *plan_}};
    }

    json advance(const json* human_action) override {
        if (done()) throw ArgumentError("episode is over");
        robot_plan();
        CarControl u_h = last_human_;
        if (human_action) {
            u_h = parse_action(*human_action);
        } else {
            const auto& hs = scenario_.human;
            switch (hs.kind) {
                case HumanKind::scripted: {
                    const auto t = static_cast<std::size_t>(x_.time_step);
                    if (t < hs.actions.size()) {
                        try {
                            u_h = parse_action(hs.actions[t]);
                        } catch (const std::exception& e) {
                            throw ConfigError(e.what(), "/human/actions/" + std::to_string(t));
                        }
                    }
                    break;
                }
                case HumanKind::best_response: {
                    const auto warm = shifted(human_plan_);
                    const auto br = trajectory_best_response(dyn_, x_, *plan_, true_model(), hs.optimizer,
                                                             warm.empty() ? nullptr : &warm);
                    human_plan_ = br.controls;
                    u_h = br.controls.front();
                    break;
                }
                case HumanKind::boltzmann: {
                    const auto rewards = human_candidate_rewards(dyn_, x_, *plan_, game_, true_style());
                    const std::size_t j = boltzmann_sample(rewards, game_.beta, human_rng_);
                    u_h = game_.human_candidates[j].front();
                    break;
                }
                default:
                    throw ConfigError("unsupported human kind for driving", "/human/kind");
            }
        }
        return apply(*plan_, u_h);
    }

    json reapply(const json& logged) override {
        if (done()) throw FormatError("log continues past the end of the episode");
        const auto plan = logged.at("aux").at("robot_plan").get<ControlSequence<CarControl>>();
        const auto u_r = logged.at("u_r").get<CarControl>();
        if (plan.empty() || !(plan.front() == u_r)) throw FormatError("logged robot plan does not start with u_r");
        return apply(plan, logged.at("u_h").get<CarControl>());
    }

    MetricsRow metrics() const override {
        MetricsRow m = m_;
        m.completion_time = x_.time_step;
        if (predictions_ > 0) m.prediction_accuracy = static_cast<double>(correct_) / predictions_;
        if (spec_.road.lane_centers.size() > 1) m.extra["merged"] = merged_ ? 1.0 : 0.0;
        if (belief_.size() > 0) m.extra["final_entropy"] = entropy(belief_);
        if (truth_ >= 0) m.extra["true_style"] = truth_;
        return m;
    }

protected:
    json initial_state() const override { return x0_; }

private:
    const DrivingStyle& true_style() const { return scenario_.human.styles.at(static_cast<std::size_t>(truth_)); }
    RewardModel<DrivingScene> true_model() const { return true_style().model(); }

    static ControlSequence<CarControl> shifted(const ControlSequence<CarControl>& u) {
        if (u.empty()) return {};
        ControlSequence<CarControl> out(u.begin() + 1, u.end());
        out.push_back(u.back());
        return out;
    }

    CarControl parse_action(const json& a) const {
        CarControl u;
        try {
            u = a.get<CarControl>();
        } catch (const json::exception&) {
            throw ArgumentError("driving action must be [steer, accel]");
        }
        dyn_.check_control(u, Agent::human);
        return u;
    }

    ControlSequence<CarControl> compute_plan() {
        const PlannerConfig& cfg = scenario_.planner.config;
        const auto& styles = scenario_.human.styles;
        const std::size_t map = belief_.map_index();
        const auto warm = shifted(robot_plan_);
        const auto* warm_ptr = warm.empty() ? nullptr : &warm;
        ControlSequence<CarControl> plan;
        if (!game_.robot_candidates.empty()) {
            const CandidateChoice c = cfg.kind == PlannerKind::info_gather
                                          ? info_gather_plan(dyn_, x_, belief_, cfg.lambda, game_, styles, robot_model_)
                                          : stackelberg_candidates(dyn_, x_, game_, styles[map], robot_model_);
            plan = game_.robot_candidates[c.robot];
        } else if (cfg.kind == PlannerKind::obstacle_baseline) {
            plan = obstacle_baseline_plan(dyn_, x_, constant_velocity_prediction(spec_.horizon), robot_model_, cfg,
                                          warm_ptr)
                       .robot;
        } else {
            plan = stackelberg_plan(dyn_, x_, styles[map].model(), robot_model_, cfg, warm_ptr).robot;
        }
        robot_plan_ = plan;
        return plan;
    }

    json apply(const ControlSequence<CarControl>& plan, const CarControl& u_h) {
        const CarControl u_r = plan.front();
        dyn_.check_control(u_r, Agent::robot);
        json aux{{"robot_plan", plan}};
        if (truth_ >= 0) aux["true_style"] = truth_;
        if (belief_.size() > 0 && truth_ >= 0) {
            m_.posterior_on_truth.push_back(belief_[static_cast<std::size_t>(truth_)]);
            ++predictions_;
            if (belief_.map_index() == static_cast<std::size_t>(truth_)) ++correct_;
        }
        const double r_r = step_reward(dyn_, x_, u_r, u_h, robot_model_);
        const double r_h = truth_ >= 0 ? step_reward(dyn_, x_, u_r, u_h, true_model()) : 0.0;
        m_.robot_return += r_r;
        m_.human_return += r_h;

        // Style inference from the observed first human control.
        if (!game_.human_candidates.empty() && belief_.size() > 1) {
            const auto ll = style_log_likelihoods(dyn_, x_, plan, game_, scenario_.human.styles);
            std::vector<double> obs(ll.size(), kNegInf);
            bool explained = false;
            for (std::size_t j = 0; j < game_.human_candidates.size(); ++j) {
                if (!(game_.human_candidates[j].front() == u_h)) continue;
                explained = true;
                for (std::size_t s = 0; s < ll.size(); ++s) {
                    obs[s] = logsumexp(std::vector<double>{obs[s], ll[s][j]});
                }
            }
            if (explained) {
                belief_ = belief_update(belief_, obs);
            } else {
                aux["unexplained"] = true;
            }
        }

        x_ = dyn_.step(x_, u_r, u_h);
        last_human_ = u_h;
        plan_.reset();
        const double half = spec_.road.lane_width / 2.0;
        if (std::abs(x_.robot.y - robot_model_.params.preferred_lane_y) < half && x_.robot.x > x_.human.x) merged_ = true;
        if (belief_.size() > 0) m_.belief_entropy_trace.push_back(entropy(belief_));
        return json{{"type", "tick"},
                    {"t", x_.time_step - 1},
                    {"u_r", u_r},
                    {"u_h", u_h},
                    {"state", x_},
                    {"rewards", {{"robot", r_r}, {"human", r_h}}},
                    {"belief", belief()},
                    {"aux", aux}};
    }

    const DrivingSpec& spec_;
    DrivingScene dyn_;
    RewardModel<DrivingScene> robot_model_;
    Rng human_rng_;
    DriveState x_;
    DriveState x0_;
    int truth_ = -1;
    Belief belief_;
    CandidateGame game_;
    std::optional<ControlSequence<CarControl>> plan_;
    ControlSequence<CarControl> robot_plan_;
    ControlSequence<CarControl> human_plan_;
    CarControl last_human_{};
    bool merged_ = false;
    int predictions_ = 0;
    int correct_ = 0;
    MetricsRow m_;
};

// ---------------------------------------------------------------------------
// Handover

class HandoverEpisode final : public Episode {
public:
    HandoverEpisode(const Scenario& sc, std::uint64_t seed)
        : Episode(sc, seed), game_(sc.handover().instance), model_(make_reward<HandoverGame>(HandoverGame::default_weights(), Agent::robot)) {
        m_.scenario = sc.id;
        m_.condition = to_string(sc.planner.config.kind);
        m_.seed = seed;
    }

    int tick() const override { return x_.time_step; }
    bool done() const override { return x_.time_step >= game_.horizon().steps; }
    json state() const override { return x_; }

    json legal_human_actions() const override {
        if (x_.time_step == 0) return game_.instance().grasps;
        return json::array({"place"});
    }

    json belief() const override { return nullptr; }

    json robot_plan() override {
        if (x_.time_step == 0) return json{{"robot", leader_plan_myopic(game_.instance())}};
        return json{{"robot", x_.orientation}};
    }

    json advance(const json* human_action) override {
        if (done()) throw ArgumentError("episode is over");
        const HandoverInstance& inst = game_.instance();
        if (x_.time_step > 0) return apply(x_.orientation, x_.grasp);
        const int o = leader_plan_myopic(inst);
        int g = 0;
        if (human_action) {
            g = parse_grasp(*human_action);
        } else {
            switch (scenario_.human.kind) {
                case HumanKind::myopic: g = myopic_grasp(inst, o); break;
                case HumanKind::perfect_collaborator: g = global_grasp(inst, o); break;
                case HumanKind::scripted:
                    if (scenario_.human.actions.empty()) throw ConfigError("scripted handover needs a grasp", "/human/actions");
                    try {
                        g = parse_grasp(scenario_.human.actions[0]);
                    } catch (const ArgumentError& e) {
                        throw ConfigError(e.what(), "/human/actions/0");
                    }
                    break;
                default: throw ConfigError("unsupported human kind for handover", "/human/kind");
            }
        }
        return apply(o, g);
    }

    json reapply(const json& logged) override {
        if (done()) throw FormatError("log continues past the end of the episode");
        return apply(logged.at("u_r").get<int>(), logged.at("u_h").get<int>());
    }

    MetricsRow metrics() const override {
        MetricsRow m = m_;
        m.completion_time = x_.time_step;
        if (x_.orientation >= 0) {
            m.extra["orientation"] = x_.orientation;
            m.extra["grasp"] = x_.grasp;
        }
        return m;
    }

protected:
    json initial_state() const override { return game_.initial_state(); }

private:
    int parse_grasp(const json& a) const {
        const auto& grasps = game_.instance().grasps;
        if (a.is_number_integer()) {
            const int g = a.get<int>();
            game_.check_control(g, Agent::human);
            return g;
        }
        if (a.is_string()) {
            for (std::size_t i = 0; i < grasps.size(); ++i) {
                if (grasps[i] == a.get<std::string>()) return static_cast<int>(i);
            }
        }
        throw ArgumentError("unknown grasp " + a.dump());
    }

    json apply(int o, int g) {
        game_.check_control(o, Agent::robot);
        game_.check_control(g, Agent::human);
        const double r = step_reward(game_, x_, o, g, model_);
        m_.robot_return += r;
        m_.human_return += r;
        x_ = game_.step(x_, o, g);
        return json{{"type", "tick"},
                    {"t", x_.time_step - 1},
                    {"u_r", o},
                    {"u_h", g},
                    {"state", x_},
                    {"rewards", {{"robot", r}, {"human", r}}},
                    {"belief", nullptr},
                    {"aux", json::object()}};
    }

    HandoverGame game_;
    RewardModel<HandoverGame> model_;
    HandoverState x_;
    MetricsRow m_;
};

}  // namespace

std::unique_ptr<Episode> make_episode(const Scenario& scenario, std::uint64_t seed) {
    switch (scenario.domain) {
        case DomainKind::gridworld: return std::make_unique<GridEpisode>(scenario, seed);
        case DomainKind::driving: return std::make_unique<DrivingEpisode>(scenario, seed);
        case DomainKind::handover: return std::make_unique<HandoverEpisode>(scenario, seed);
    }
    throw ConfigError("unknown domain", "/domain/kind");
}

}  // namespace hri
