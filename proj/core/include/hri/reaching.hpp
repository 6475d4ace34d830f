#pragma once

// Planar point-to-goal reaching with a finite set of candidate goals. An
// observer who does not know the goal infers it from the motion so far,
// assuming the mover is efficient (reward = -cost_weight * path length).

#include <vector>

#include "hri/visit_task.hpp"

namespace hri {

using Path2 = std::vector<Point2>;

struct ReachingScene {
    Point2 start;
    std::vector<Point2> goals;
    double cost_weight = 1.0;
    int waypoints = 20;  // segments per path
    // Lateral control-point offsets of the quadratic Bezier candidates, in
    // meters; positive bends to the left of the start->goal direction.
    std::vector<double> offsets;

    void validate() const;
};

// Quadratic Bezier from start to goal whose control point sits at the chord
// midpoint shifted by `offset` along the chord's left normal. Returns
// waypoints + 1 points sampled uniformly in the curve parameter.
Path2 bezier_path(Point2 start, Point2 goal, double offset, int waypoints);

double path_length(const Path2& path);

// Observer posterior over goals after seeing path[0..k]:
//   P(g | prefix) proportional to prior(g) exp(-c len(prefix) - c |q - g|) / exp(-c |s - g|)
std::vector<double> goal_posterior(const ReachingScene& scene, const Path2& path, int k,
                                   const std::vector<double>& prior);

}  // namespace hri
