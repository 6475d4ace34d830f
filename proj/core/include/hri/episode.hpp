#pragma once

// The tick loop shared by batch runs and interactive sessions: the robot
// plans from the current state, the human acts (simulated, scripted or
// supplied live), the world advances one step and inference updates.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hri/scenario.hpp"

namespace hri {

inline constexpr int kLogSchemaVersion = 1;

struct MetricsRow {
    std::string scenario;
    std::string condition;  // planner kind
    std::uint64_t seed = 0;
    double completion_time = 0.0;  // steps
    double robot_return = 0.0;
    double human_return = 0.0;
    std::vector<double> belief_entropy_trace;
    std::vector<double> posterior_on_truth;
    std::optional<double> prediction_accuracy;
    std::map<std::string, double> extra;
};

json metrics_to_json(const MetricsRow& m);
MetricsRow metrics_from_json(const json& j);

class Episode {
public:
    virtual ~Episode() = default;

    const Scenario& scenario() const { return scenario_; }
    std::uint64_t seed() const { return seed_; }

    // First log record: schema version, scenario id, seed, scenario config
    // and initial state.
    json header() const;

    virtual int tick() const = 0;
    virtual bool done() const = 0;
    virtual json state() const = 0;
    virtual json legal_human_actions() const = 0;
    // Current belief over the human's goal/style, or null when not tracked.
    virtual json belief() const = 0;
    // The robot's plan for the current tick (computed once per tick).
    virtual json robot_plan() = 0;

    // Advance one tick. With `human_action` the human's control is taken as
    // given (ArgumentError if illegal, state unchanged); otherwise the
    // configured human model acts. Returns the tick record.
    virtual json advance(const json* human_action = nullptr) = 0;

    // Replay: apply the controls of a logged tick record without planning or
    // simulating, then return the recomputed record.
    virtual json reapply(const json& logged_tick) = 0;

    virtual MetricsRow metrics() const = 0;

protected:
    Episode(Scenario scenario, std::uint64_t seed) : scenario_(std::move(scenario)), seed_(seed) {}
    virtual json initial_state() const = 0;

    Scenario scenario_;
    std::uint64_t seed_;
};

std::unique_ptr<Episode> make_episode(const Scenario& scenario, std::uint64_t seed);

}  // namespace hri
