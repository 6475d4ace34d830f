#pragma once

// JSON encodings of states and controls shared by logs, scenarios and the
// session protocol. Doubles round-trip exactly through nlohmann::json.

#include <nlohmann/json.hpp>

#include "hri/driving.hpp"
#include "hri/gridworld.hpp"
#include "hri/handover.hpp"

namespace hri {

using json = nlohmann::json;

void to_json(json& j, const Cell& c);
void from_json(const json& j, Cell& c);

void to_json(json& j, const GridState& s);
void from_json(const json& j, GridState& s);

void to_json(json& j, const CarState& c);
void from_json(const json& j, CarState& c);

void to_json(json& j, const CarControl& u);
void from_json(const json& j, CarControl& u);

void to_json(json& j, const DriveState& s);
void from_json(const json& j, DriveState& s);

void to_json(json& j, const HandoverState& s);
void from_json(const json& j, HandoverState& s);

// Required-field access with ConfigError carrying the field path.
const json& require(const json& obj, const std::string& key, const std::string& path);

template <class T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value: ") + e.what(), path + "/" + key);
    }
}

template <class T>
T get_required(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    try {
        return v.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value: ") + e.what(), path + "/" + key);
    }
}

}  // namespace hri
