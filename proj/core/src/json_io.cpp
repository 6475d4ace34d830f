#include "hri/json_io.hpp"

namespace hri {

void to_json(json& j, const Cell& c) { j = json::array({c.x, c.y}); }

void from_json(const json& j, Cell& c) {
    if (!j.is_array() || j.size() != 2) throw json::type_error::create(302, "cell must be [x, y]", &j);
    c = {j[0].get<int>(), j[1].get<int>()};
}

void to_json(json& j, const GridState& s) {
    j = json{{"collected", s.collected}, {"robot", s.robot}, {"human", s.human}, {"t", s.time_step}};
}

void from_json(const json& j, GridState& s) {
    s.collected = j.at("collected").get<std::uint32_t>();
    s.robot = j.at("robot").get<Cell>();
    s.human = j.at("human").get<Cell>();
    s.time_step = j.at("t").get<int>();
}

void to_json(json& j, const CarState& c) {
    j = json{{"x", c.x}, {"y", c.y}, {"heading", c.heading}, {"speed", c.speed}};
}

void from_json(const json& j, CarState& c) {
    c.x = j.at("x").get<double>();
    c.y = j.at("y").get<double>();
    c.heading = j.value("heading", 0.0);
    c.speed = j.value("speed", 0.0);
}

void to_json(json& j, const CarControl& u) { j = json::array({u.steer, u.accel}); }

void from_json(const json& j, CarControl& u) {
    if (!j.is_array() || j.size() != 2) throw json::type_error::create(302, "control must be [steer, accel]", &j);
    u = {j[0].get<double>(), j[1].get<double>()};
}

void to_json(json& j, const DriveState& s) {
    j = json{{"robot", s.robot}, {"human", s.human}, {"t", s.time_step}};
}

void from_json(const json& j, DriveState& s) {
    s.robot = j.at("robot").get<CarState>();
    s.human = j.at("human").get<CarState>();
    s.time_step = j.at("t").get<int>();
}

void to_json(json& j, const HandoverState& s) {
    j = json{{"orientation", s.orientation}, {"grasp", s.grasp}, {"t", s.time_step}};
}

void from_json(const json& j, HandoverState& s) {
    s.orientation = j.at("orientation").get<int>();
    s.grasp = j.at("grasp").get<int>();
    s.time_step = j.at("t").get<int>();
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ConfigError("expected an object", path);
    if (!obj.contains(key)) throw ConfigError("missing required field", path + "/" + key);
    return obj.at(key);
}

}  // namespace hri
