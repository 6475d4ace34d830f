#pragma once

// Scenario files: versioned JSON describing a domain instance, the human
// model, the robot planner and the seed list. Field reference: README.md.

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "hri/json_io.hpp"
#include "hri/planners.hpp"

namespace hri {

inline constexpr int kScenarioSchemaVersion = 1;

struct GridSpec {
    int width = 1;
    int height = 1;
    std::vector<Cell> targets;
    Cell robot;
    Cell human;
    int horizon = 1;
    Eigen::VectorXd weights;  // (time_penalty, collect_bonus)
};

struct DrivingSpec {
    Road road;
    ControlBounds bounds;
    double v_max = 20.0;
    double dt = 0.1;
    int horizon = 20;  // planning horizon T
    int ticks = 30;    // episode length
    CarState robot;
    CarState human;
    // Per-seed uniform perturbation half-widths of the initial condition.
    double jitter_human_x = 0.0;
    double jitter_human_speed = 0.0;
    double jitter_robot_x = 0.0;
    DrivingStyle robot_reward;
};

struct HandoverSpec {
    HandoverInstance instance;
};

enum class DomainKind { gridworld, driving, handover };
const char* to_string(DomainKind k);

struct HumanSpec {
    HumanKind kind = HumanKind::boltzmann;
    double beta = 1.0;
    std::vector<DrivingStyle> styles;  // driving only
    std::vector<double> prior;         // over styles; the true style is drawn from it per seed
    std::vector<ControlSequence<CarControl>> candidates;  // driving Boltzmann response set
    ContinuousOptions optimizer;       // driving best response
    json actions = json::array();      // scripted only
};

struct PlannerSpec {
    PlannerConfig config;
    double inference_beta = 1.0;  // gridworld goal inference
    std::vector<ControlSequence<CarControl>> candidates;  // driving candidate mode
};

struct Scenario {
    std::string id;
    std::string pair_group;  // scenarios sharing a group are compared pairwise by seed
    DomainKind domain = DomainKind::gridworld;
    std::variant<GridSpec, DrivingSpec, HandoverSpec> spec;
    HumanSpec human;
    PlannerSpec planner;
    std::vector<std::uint64_t> seeds;
    json config;  // the file as given, echoed into run logs

    const GridSpec& grid() const { return std::get<GridSpec>(spec); }
    const DrivingSpec& driving() const { return std::get<DrivingSpec>(spec); }
    const HandoverSpec& handover() const { return std::get<HandoverSpec>(spec); }
};

Scenario parse_scenario(const json& j);
Scenario load_scenario(const std::filesystem::path& file);

// "0-199", "3,5,8" or a mix such as "0-9,20".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

// Piece list [{"steps": n, "steer": s, "accel": a}, ...] -> controls.
ControlSequence<CarControl> parse_piecewise(const json& pieces, const std::string& path);

}  // namespace hri
