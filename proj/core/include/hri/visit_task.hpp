#pragma once

// Ordered visits to a handful of points in the plane. A plan is a visiting
// order; its reward is -weight * (Euclidean path length from the start).

#include <span>
#include <vector>

namespace hri {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

double distance(Point2 a, Point2 b);

using VisitOrder = std::vector<int>;

struct VisitTask {
    Point2 start;
    std::vector<Point2> targets;
    double weight = 1.0;

    static constexpr int kMaxTargets = 9;

    void validate() const;
    int size() const { return static_cast<int>(targets.size()); }
    void check_order(std::span<const int> order) const;  // must be a permutation
    double path_length(std::span<const int> order) const;
    double reward(std::span<const int> order) const { return -weight * path_length(order); }
};

// All visiting orders, lexicographic.
std::vector<VisitOrder> all_orders(const VisitTask& task);

}  // namespace hri
