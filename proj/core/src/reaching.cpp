#include "hri/reaching.hpp"

#include <cmath>

#include "hri/errors.hpp"
#include "hri/numeric.hpp"

namespace hri {

void ReachingScene::validate() const {
    if (goals.empty()) throw ConfigError("at least one goal is required", "goals");
    if (waypoints < 2) throw ConfigError("waypoints must be >= 2", "waypoints");
    if (!(cost_weight > 0.0)) throw ConfigError("cost_weight must be > 0", "cost_weight");
    if (offsets.empty()) throw ConfigError("candidate offset list is empty", "offsets");
}

Path2 bezier_path(Point2 s, Point2 g, double offset, int waypoints) {
    const double dx = g.x - s.x, dy = g.y - s.y;
    const double len = std::hypot(dx, dy);
    Point2 c{(s.x + g.x) / 2.0, (s.y + g.y) / 2.0};
    if (len > 0.0) {
        c.x += offset * (-dy / len);
        c.y += offset * (dx / len);
    }
    Path2 path;
    path.reserve(static_cast<std::size_t>(waypoints) + 1);
    for (int i = 0; i <= waypoints; ++i) {
        const double t = static_cast<double>(i) / waypoints;
        const double a = (1 - t) * (1 - t), b = 2 * (1 - t) * t, e = t * t;
        path.push_back({a * s.x + b * c.x + e * g.x, a * s.y + b * c.y + e * g.y});
    }
    return path;
}

double path_length(const Path2& path) {
    double len = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) len += distance(path[i - 1], path[i]);
    return len;
}

std::vector<double> goal_posterior(const ReachingScene& scene, const Path2& path, int k,
                                   const std::vector<double>& prior) {
    if (prior.size() != scene.goals.size()) throw ArgumentError("prior must have one entry per goal");
    if (k < 0 || k >= static_cast<int>(path.size())) throw ArgumentError("waypoint index out of range");
    const Point2 s = path.front();
    const Point2 q = path[static_cast<std::size_t>(k)];
    double prefix = 0.0;
    for (int i = 1; i <= k; ++i) prefix += distance(path[static_cast<std::size_t>(i - 1)], path[static_cast<std::size_t>(i)]);
    std::vector<double> logp(scene.goals.size());
    for (std::size_t i = 0; i < scene.goals.size(); ++i) {
        const Point2 g = scene.goals[i];
        logp[i] = prior[i] > 0.0
                      ? std::log(prior[i]) + scene.cost_weight * (-prefix - distance(q, g) + distance(s, g))
                      : kNegInf;
    }
    return softmax(logp);
}

}  // namespace hri
