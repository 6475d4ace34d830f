#include "hri/scenario.hpp"

#include <fstream>
#include <sstream>

namespace hri {

const char* to_string(DomainKind k) {
    switch (k) {
        case DomainKind::gridworld: return "gridworld";
        case DomainKind::driving: return "driving";
        case DomainKind::handover: return "handover";
    }
    return "?";
}

namespace {

Eigen::VectorXd parse_vector(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError("expected an array of numbers", path);
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ConfigError("expected a number", path + "/" + std::to_string(i));
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

Cell parse_cell(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
        throw ConfigError("expected a cell [x, y]", path);
    }
    return {j[0].get<int>(), j[1].get<int>()};
}

CarState parse_car(const json& j, const std::string& path) {
    CarState c;
    c.x = get_required<double>(j, "x", path);
    c.y = get_required<double>(j, "y", path);
    c.heading = get_or<double>(j, "heading", 0.0, path);
    c.speed = get_or<double>(j, "speed", 0.0, path);
    return c;
}

DrivingStyle parse_style(const json& j, const std::string& path, const std::string& default_label) {
    DrivingStyle s;
    s.label = get_or<std::string>(j, "label", default_label, path);
    s.weights = parse_vector(require(j, "weights", path), path + "/weights");
    if (s.weights.size() != DrivingScene::kFeatureCount) {
        throw ConfigError("driving styles need 5 weights (lane, speed_dev, collision, off_road, progress)",
                          path + "/weights");
    }
    s.params.preferred_lane_y = get_or<double>(j, "preferred_lane_y", 0.0, path);
    s.params.desired_speed = get_or<double>(j, "desired_speed", 10.0, path);
    s.params.collision_sigma = get_or<double>(j, "collision_sigma", 2.0, path);
    if (!(s.params.collision_sigma > 0.0)) throw ConfigError("collision_sigma must be > 0", path + "/collision_sigma");
    return s;
}

ContinuousOptions parse_optimizer(const json& j, const std::string& path, PlannerConfig* planner = nullptr) {
    ContinuousOptions o;
    if (j.is_null()) return o;
    if (!j.is_object()) throw ConfigError("expected an object", path);
    o.pieces = get_or<int>(j, "pieces", o.pieces, path);
    o.starts = get_or<int>(j, "starts", o.starts, path);
    o.ascent.max_iterations = get_or<int>(j, "max_iterations", o.ascent.max_iterations, path);
    o.ascent.gradient_tolerance = get_or<double>(j, "tolerance", o.ascent.gradient_tolerance, path);
    o.seed = get_or<std::uint64_t>(j, "seed", o.seed, path);
    if (o.pieces < 1) throw ConfigError("pieces must be >= 1", path + "/pieces");
    if (o.starts < 1) throw ConfigError("starts must be >= 1", path + "/starts");
    if (planner) {
        planner->outer_starts = get_or<int>(j, "outer_starts", planner->outer_starts, path);
        planner->outer_iterations = get_or<int>(j, "outer_iterations", planner->outer_iterations, path);
    }
    return o;
}

std::vector<ControlSequence<CarControl>> parse_candidates(const json& j, const std::string& path, int horizon) {
    if (!j.is_array() || j.empty()) throw ConfigError("expected a non-empty array of piece lists", path);
    std::vector<ControlSequence<CarControl>> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "/" + std::to_string(i);
        auto seq = parse_piecewise(j[i], p);
        if (static_cast<int>(seq.size()) != horizon) {
            throw ConfigError("candidate covers " + std::to_string(seq.size()) + " steps, horizon is " +
                                  std::to_string(horizon),
                              p);
        }
        out.push_back(std::move(seq));
    }
    return out;
}

GridSpec parse_grid(const json& d) {
    const std::string path = "/domain";
    GridSpec g;
    g.width = get_required<int>(d, "width", path);
    g.height = get_required<int>(d, "height", path);
    const json& ts = require(d, "targets", path);
    if (!ts.is_array()) throw ConfigError("expected an array of cells", path + "/targets");
    for (std::size_t i = 0; i < ts.size(); ++i) g.targets.push_back(parse_cell(ts[i], path + "/targets/" + std::to_string(i)));
    g.robot = parse_cell(require(d, "robot", path), path + "/robot");
    g.human = parse_cell(require(d, "human", path), path + "/human");
    g.horizon = get_required<int>(d, "horizon", path);
    g.weights = d.contains("weights") ? parse_vector(d.at("weights"), path + "/weights")
                                      : GridworldCollect::default_weights();
    if (g.weights.size() != 2) throw ConfigError("gridworld needs 2 weights", path + "/weights");
    // Constructing the domain validates bounds, targets and horizon.
    try {
        GridworldCollect dyn(g.width, g.height, g.targets, g.horizon);
        (void)dyn.initial_state(g.robot, g.human);
    } catch (const ConfigError& e) {
        throw ConfigError(e.what(), path);
    }
    return g;
}

DrivingSpec parse_driving(const json& d) {
    const std::string path = "/domain";
    DrivingSpec s;
    if (d.contains("lanes")) {
        const json& lanes = d.at("lanes");
        if (!lanes.is_array() || lanes.empty()) throw ConfigError("expected a non-empty array", path + "/lanes");
        s.road.lane_centers.clear();
        for (const auto& l : lanes) s.road.lane_centers.push_back(l.get<double>());
    }
    s.road.lane_width = get_or<double>(d, "lane_width", s.road.lane_width, path);
    s.v_max = get_or<double>(d, "v_max", s.v_max, path);
    s.dt = get_or<double>(d, "dt", s.dt, path);
    s.horizon = get_or<int>(d, "horizon", s.horizon, path);
    s.ticks = get_or<int>(d, "ticks", s.ticks, path);
    if (s.ticks < 1) throw ConfigError("ticks must be >= 1", path + "/ticks");
    if (d.contains("bounds")) {
        const json& b = d.at("bounds");
        s.bounds.steer_max = get_or<double>(b, "steer_max", s.bounds.steer_max, path + "/bounds");
        s.bounds.accel_min = get_or<double>(b, "accel_min", s.bounds.accel_min, path + "/bounds");
        s.bounds.accel_max = get_or<double>(b, "accel_max", s.bounds.accel_max, path + "/bounds");
    }
    s.robot = parse_car(require(d, "robot", path), path + "/robot");
    s.human = parse_car(require(d, "human", path), path + "/human");
    if (d.contains("jitter")) {
        const json& j = d.at("jitter");
        s.jitter_human_x = get_or<double>(j, "human_x", 0.0, path + "/jitter");
        s.jitter_human_speed = get_or<double>(j, "human_speed", 0.0, path + "/jitter");
        s.jitter_robot_x = get_or<double>(j, "robot_x", 0.0, path + "/jitter");
    }
    s.robot_reward = parse_style(require(d, "robot_reward", path), path + "/robot_reward", "robot");
    try {
        DrivingScene scene(s.road, s.bounds, s.v_max, Horizon{s.horizon, s.dt});
        scene.check_state(DriveState{s.robot, s.human, 0});
    } catch (const ConfigError& e) {
        throw ConfigError(e.what(), path);
    } catch (const ArgumentError& e) {
        throw ConfigError(e.what(), path);
    }
    return s;
}

HandoverSpec parse_handover(const json& d) {
    const std::string path = "/domain";
    HandoverSpec h;
    h.instance.orientations = get_required<std::vector<std::string>>(d, "orientations", path);
    h.instance.grasps = get_required<std::vector<std::string>>(d, "grasps", path);
    h.instance.c1 = get_required<std::vector<std::vector<double>>>(d, "c1", path);
    h.instance.c2 = get_required<std::vector<double>>(d, "c2", path);
    try {
        h.instance.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(e.what(), path + (e.path().empty() ? "" : "/" + e.path()));
    }
    return h;
}

std::vector<std::uint64_t> parse_seeds(const json& j) {
    const std::string path = "/seeds";
    std::vector<std::uint64_t> seeds;
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (!j[i].is_number_integer() || j[i].get<std::int64_t>() < 0) throw ConfigError("seeds must be non-negative integers", path + "/" + std::to_string(i));
            seeds.push_back(j[i].get<std::uint64_t>());
        }
    } else if (j.is_object()) {
        const auto first = get_or<std::uint64_t>(j, "first", 0, path);
        const auto count = get_required<std::uint64_t>(j, "count", path);
        for (std::uint64_t i = 0; i < count; ++i) seeds.push_back(first + i);
    } else if (j.is_string()) {
        seeds = parse_seed_list(j.get<std::string>());
    } else {
        throw ConfigError("expected a seed list, range object or range string", path);
    }
    if (seeds.empty()) throw ConfigError("seed list is empty", path);
    return seeds;
}

}  // namespace

ControlSequence<CarControl> parse_piecewise(const json& pieces, const std::string& path) {
    if (!pieces.is_array() || pieces.empty()) throw ConfigError("expected a non-empty piece list", path);
    ControlSequence<CarControl> out;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const std::string p = path + "/" + std::to_string(i);
        const int steps = get_required<int>(pieces[i], "steps", p);
        if (steps < 1) throw ConfigError("steps must be >= 1", p + "/steps");
        const CarControl u{get_or<double>(pieces[i], "steer", 0.0, p), get_or<double>(pieces[i], "accel", 0.0, p)};
        out.insert(out.end(), static_cast<std::size_t>(steps), u);
    }
    return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        try {
            const auto dash = part.find('-');
            if (dash == std::string::npos) {
                out.push_back(std::stoull(part));
            } else {
                const auto lo = std::stoull(part.substr(0, dash));
                const auto hi = std::stoull(part.substr(dash + 1));
                if (hi < lo) throw ConfigError("descending seed range '" + part + "'", "seeds");
                for (auto s = lo; s <= hi; ++s) out.push_back(s);
            }
        } catch (const std::logic_error&) {
            throw ConfigError("malformed seed list '" + text + "'", "seeds");
        }
    }
    if (out.empty()) throw ConfigError("seed list is empty", "seeds");
    return out;
}

Scenario parse_scenario(const json& j) {
    if (!j.is_object()) throw ConfigError("scenario must be a JSON object", "/");
    const int version = get_required<int>(j, "schema_version", "");
    if (version != kScenarioSchemaVersion) {
        throw ConfigError("unsupported schema_version " + std::to_string(version), "/schema_version");
    }
    Scenario sc;
    sc.config = j;
    sc.id = get_required<std::string>(j, "id", "");
    sc.pair_group = get_or<std::string>(j, "pair_group", "", "");

    const json& d = require(j, "domain", "");
    const auto kind = get_required<std::string>(d, "kind", "/domain");
    if (kind == "gridworld") {
        sc.domain = DomainKind::gridworld;
        sc.spec = parse_grid(d);
    } else if (kind == "driving") {
        sc.domain = DomainKind::driving;
        sc.spec = parse_driving(d);
    } else if (kind == "handover") {
        sc.domain = DomainKind::handover;
        sc.spec = parse_handover(d);
    } else {
        throw ConfigError("unknown domain kind '" + kind + "'", "/domain/kind");
    }

    // Human model.
    const json& h = require(j, "human", "");
    sc.human.kind = parse_human_kind(get_required<std::string>(h, "kind", "/human"));
    sc.human.beta = get_or<double>(h, "beta", 1.0, "/human");
    if (!(sc.human.beta > 0.0)) throw ConfigError("beta must be > 0", "/human/beta");
    if (sc.human.kind == HumanKind::scripted) {
        sc.human.actions = require(h, "actions", "/human");
        if (!sc.human.actions.is_array()) throw ConfigError("expected an array", "/human/actions");
    }
    if (sc.domain == DomainKind::driving) {
        const auto& ds = sc.driving();
        if (h.contains("styles")) {
            const json& st = h.at("styles");
            if (!st.is_array() || st.empty()) throw ConfigError("expected a non-empty array", "/human/styles");
            for (std::size_t i = 0; i < st.size(); ++i) {
                sc.human.styles.push_back(parse_style(st[i], "/human/styles/" + std::to_string(i), "style" + std::to_string(i)));
            }
        } else if (sc.human.kind != HumanKind::scripted) {
            throw ConfigError("missing required field", "/human/styles");
        }
        if (h.contains("prior")) {
            sc.human.prior = get_required<std::vector<double>>(h, "prior", "/human");
        } else if (!sc.human.styles.empty()) {
            sc.human.prior.assign(sc.human.styles.size(), 1.0 / static_cast<double>(sc.human.styles.size()));
        }
        if (!sc.human.styles.empty()) {
            if (sc.human.prior.size() != sc.human.styles.size()) {
                throw ConfigError("prior needs one entry per style", "/human/prior");
            }
            try {
                (void)Belief(sc.human.prior);
            } catch (const ArgumentError& e) {
                throw ConfigError(e.what(), "/human/prior");
            }
        }
        if (h.contains("candidates")) sc.human.candidates = parse_candidates(h.at("candidates"), "/human/candidates", ds.horizon);
        sc.human.optimizer = parse_optimizer(h.value("optimizer", json()), "/human/optimizer");
        if (sc.human.kind == HumanKind::boltzmann && sc.human.candidates.empty()) {
            throw ConfigError("a Boltzmann driver needs a candidate response set", "/human/candidates");
        }
        if (sc.human.kind == HumanKind::myopic || sc.human.kind == HumanKind::perfect_collaborator) {
            throw ConfigError("driving supports best-response, boltzmann and scripted humans", "/human/kind");
        }
    } else if (sc.domain == DomainKind::handover) {
        if (sc.human.kind == HumanKind::best_response || sc.human.kind == HumanKind::boltzmann) {
            throw ConfigError("handover supports myopic, perfect-collaborator and scripted humans", "/human/kind");
        }
    } else if (sc.human.kind == HumanKind::best_response) {
        throw ConfigError("gridworld supports boltzmann, myopic, perfect-collaborator and scripted humans",
                          "/human/kind");
    }

    // Planner.
    const json& p = require(j, "planner", "");
    PlannerConfig& cfg = sc.planner.config;
    cfg.kind = parse_planner_kind(get_required<std::string>(p, "kind", "/planner"));
    cfg.lambda = get_or<double>(p, "lambda", 0.0, "/planner");
    cfg.seed = get_or<std::uint64_t>(p, "seed", 0, "/planner");
    cfg.optimizer = parse_optimizer(p.value("optimizer", json()), "/planner/optimizer", &cfg);
    cfg.optimizer.seed = mix_seed(cfg.seed, cfg.optimizer.seed);
    cfg.validate();
    sc.planner.inference_beta = get_or<double>(p, "inference_beta", sc.human.beta, "/planner");
    if (!(sc.planner.inference_beta > 0.0)) throw ConfigError("inference_beta must be > 0", "/planner/inference_beta");

    switch (sc.domain) {
        case DomainKind::gridworld:
            if (cfg.kind != PlannerKind::fixed && cfg.kind != PlannerKind::reactive &&
                cfg.kind != PlannerKind::predictive) {
                throw ConfigError("gridworld supports fixed, reactive and predictive planners", "/planner/kind");
            }
            break;
        case DomainKind::handover:
            if (cfg.kind != PlannerKind::leader_myopic) {
                throw ConfigError("handover supports the leader-myopic planner", "/planner/kind");
            }
            break;
        case DomainKind::driving: {
            const auto& ds = sc.driving();
            if (p.contains("candidates")) sc.planner.candidates = parse_candidates(p.at("candidates"), "/planner/candidates", ds.horizon);
            if (cfg.kind == PlannerKind::info_gather && sc.planner.candidates.empty()) {
                throw ConfigError("info-gather needs a robot candidate set", "/planner/candidates");
            }
            if (!sc.planner.candidates.empty() && sc.human.candidates.empty()) {
                throw ConfigError("candidate planning needs the human candidate set", "/human/candidates");
            }
            if (cfg.kind != PlannerKind::stackelberg && cfg.kind != PlannerKind::info_gather &&
                cfg.kind != PlannerKind::obstacle_baseline) {
                throw ConfigError("driving supports stackelberg, info-gather and obstacle-baseline planners",
                                  "/planner/kind");
            }
            if (sc.human.styles.empty()) {
                throw ConfigError("the robot's model of the human needs at least one style", "/human/styles");
            }
            DrivingScene scene(ds.road, ds.bounds, ds.v_max, Horizon{ds.horizon, ds.dt});
            for (const auto* set : {&sc.planner.candidates, &sc.human.candidates}) {
                for (const auto& c : *set) {
                    for (const auto& u : c) {
                        try {
                            scene.check_control(u, Agent::robot);
                        } catch (const ArgumentError& e) {
                            throw ConfigError(e.what(), set == &sc.planner.candidates ? "/planner/candidates" : "/human/candidates");
                        }
                    }
                }
            }
            break;
        }
    }

    sc.seeds = j.contains("seeds") ? parse_seeds(j.at("seeds")) : std::vector<std::uint64_t>{0};
    return sc;
}

Scenario load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open scenario file " + file.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(file.string() + ": " + e.what(), "/");
    }
    return parse_scenario(j);
}

}  // namespace hri
